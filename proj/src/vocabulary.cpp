#include "scout/vocabulary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "scout/util.hpp"
#include "scout/vec.hpp"

namespace scout {

const Concept* Vocabulary::find(int id) const {
    auto it = std::lower_bound(concepts.begin(), concepts.end(), id,
                               [](const Concept& c, int v) { return c.id < v; });
    if (it == concepts.end() || it->id != id) return nullptr;
    return &*it;
}

namespace {

// Shared line-oriented parser: `text_fields` leading text columns, then d
// floats. Returns one row per record; d fixed by the first record.
struct ParsedRow {
    std::vector<std::string> text;
    std::vector<double> values;
};

std::vector<ParsedRow> parse_tsv(const std::string& path, std::size_t text_fields,
                                 const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + ": cannot open '" + path + "'");
    std::vector<ParsedRow> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() <= text_fields)
            throw ConfigError(std::string(what) + ": line " + std::to_string(lineno) +
                              ": expected text fields plus embedding floats");
        ParsedRow row;
        for (std::size_t i = 0; i < text_fields; ++i)
            row.text.emplace_back(trim(fields[i]));
        for (std::size_t i = text_fields; i < fields.size(); ++i)
            row.values.push_back(parse_double(fields[i], what));
        if (dim == 0) {
            dim = row.values.size();
        } else if (row.values.size() != dim) {
            throw ConfigError(std::string(what) + ": line " + std::to_string(lineno) +
                              ": embedding dimension " + std::to_string(row.values.size()) +
                              " != " + std::to_string(dim));
        }
        for (double v : row.values)
            if (!std::isfinite(v))
                throw ConfigError(std::string(what) + ": line " + std::to_string(lineno) +
                                  ": non-finite embedding value");
        if (norm2(row.values) == 0.0)
            throw ConfigError(std::string(what) + ": line " + std::to_string(lineno) +
                              ": zero-norm embedding");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(std::string(what) + ": no records in '" + path + "'");
    return rows;
}

} // namespace

Vocabulary load_vocabulary(const std::string& path) {
    auto rows = parse_tsv(path, 3, "vocabulary");
    Vocabulary v;
    v.dimension = rows.front().values.size();
    v.concepts.reserve(rows.size());
    int id = 0;
    for (auto& row : rows) {
        Concept c;
        c.id = id++;
        c.lemma = std::move(row.text[0]);
        c.hypernym = std::move(row.text[1]);
        c.definition = std::move(row.text[2]);
        c.embedding = std::move(row.values);
        v.concepts.push_back(std::move(c));
    }
    return v;
}

std::string render_embedding_text(const Concept& c) {
    if (c.lemma.empty()) throw std::invalid_argument("render_embedding_text: empty lemma");
    std::string out = c.lemma;
    if (!c.hypernym.empty()) out += " (" + c.hypernym + ")";
    if (!c.definition.empty()) out += ": " + c.definition;
    return out;
}

LabelSet load_label_embeddings(const std::string& path) {
    auto rows = parse_tsv(path, 1, "labels");
    LabelSet ls;
    for (auto& row : rows) {
        ls.names.push_back(std::move(row.text[0]));
        ls.vectors.push_back(std::move(row.values));
    }
    return ls;
}

Vocabulary prune_by_label_set(const Vocabulary& v,
                              const std::vector<std::vector<double>>& labels,
                              double fraction, int k) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("prune_by_label_set: fraction outside (0, 1]");
    if (labels.empty()) throw std::invalid_argument("prune_by_label_set: no labels");
    for (const auto& l : labels)
        if (l.size() != v.dimension)
            throw std::invalid_argument("prune_by_label_set: label dimension mismatch");
    if (k < 0) k = static_cast<int>((labels.size() + 2) / 3); // ceil(|labels|/3)
    if (k < 1 || static_cast<std::size_t>(k) > labels.size())
        throw std::invalid_argument("prune_by_label_set: k outside [1, |labels|]");

    std::vector<double> scores(v.size());
    std::vector<double> sims(labels.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < labels.size(); ++j)
            sims[j] = cosine(v.concepts[i].embedding, labels[j]);
        std::partial_sort(sims.begin(), sims.begin() + k, sims.end(), std::greater<>());
        scores[i] = std::accumulate(sims.begin(), sims.begin() + k, 0.0) / k;
    }

    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return v.concepts[a].id < v.concepts[b].id;
    });
    std::size_t keep = ceil_fraction(v.size(), fraction);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end()); // restore id order

    Vocabulary out;
    out.dimension = v.dimension;
    out.concepts.reserve(keep);
    for (std::size_t i : idx) out.concepts.push_back(v.concepts[i]);
    return out;
}

} // namespace scout
