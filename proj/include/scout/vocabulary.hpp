#pragma once

#include <string>
#include <vector>

namespace scout {

struct Concept {
    int id = -1;
    std::string lemma;
    std::string hypernym;   // may be empty
    std::string definition; // may be empty
    std::vector<double> embedding;
};

/// Ordered concept list. Freshly loaded vocabularies have ids 0..N-1; pruned
/// ones keep their original ids (still strictly increasing).
struct Vocabulary {
    std::vector<Concept> concepts;
    std::size_t dimension = 0;

    std::size_t size() const { return concepts.size(); }
    const Concept& at_index(std::size_t i) const { return concepts[i]; }

    /// Lookup by id (binary search over the increasing-id invariant).
    const Concept* find(int id) const;
};

/// Parses the TSV vocabulary format: lemma, hypernym, definition, then d
/// floats per line; '#' lines and blank lines skipped. Embeddings are taken
/// verbatim (no renormalization); zero-norm or non-finite rows are rejected.
Vocabulary load_vocabulary(const std::string& path);

/// Text form used when embedding a concept: "lemma (hypernym): definition",
/// with empty fields elided.
std::string render_embedding_text(const Concept& c);

struct LabelSet {
    std::vector<std::string> names;
    std::vector<std::vector<double>> vectors;
};

/// Parses the label-embedding format: label-name then d floats, TAB-separated.
LabelSet load_label_embeddings(const std::string& path);

/// Keeps the ceil(fraction*N) concepts whose mean top-k cosine similarity to
/// the label vectors is largest (ties to lower id). k = -1 selects the
/// default ceil(|labels|/3).
Vocabulary prune_by_label_set(const Vocabulary& v,
                              const std::vector<std::vector<double>>& labels,
                              double fraction, int k = -1);

} // namespace scout
