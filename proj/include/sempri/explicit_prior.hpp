#ifndef SEMPRI_EXPLICIT_PRIOR_HPP
#define SEMPRI_EXPLICIT_PRIOR_HPP

#include <filesystem>
#include <vector>

#include "sempri/core.hpp"
#include "sempri/dataset_io.hpp"

namespace sempri {

// Accumulated class-pair saliency priors learned from annotated images.
// sp[k][t] = sum_i p_k^i * theta_kt^i / (sum_i theta_kt^i + epsilon), where
// p_k is the per-image density of GT-salient pixels within class k and
// theta_kt indicates per-image co-occurrence of classes k and t.
struct ExplicitPriorTable {
    int num_classes = 0;
    double epsilon = 1e-8;
    int num_train_images = 0;
    std::vector<double> sp;               // n_c*n_c, row-major
    std::vector<double> numerator_acc;    // sums of p_k * theta_kt
    std::vector<double> denominator_acc;  // sums of theta_kt

    double at(int k, int t) const { return sp[static_cast<std::size_t>(k) * num_classes + t]; }

    // Folds one annotated image into the accumulators (does not refresh sp).
    void accumulate(const LabelMap& labels, const GroundTruthMask& mask);
    // Merges another table's accumulators (associative, order-independent sums).
    void merge(const ExplicitPriorTable& other);
    // Recomputes sp from the accumulators.
    void refresh();
};

// Density of class k: GT-salient pixels of class k / pixels of class k.
// Returns 0 when the class is absent.
double class_density(const LabelMap& labels, const GroundTruthMask& mask, int k);

// 1 iff classes k and t both occur somewhere in the label map (k == t allowed).
int cooccurrence(const LabelMap& labels, int k, int t);

// Trains the prior table over every entry of a train manifest.
ExplicitPriorTable train_explicit_priors(const DatasetManifest& train, double epsilon = 1e-8);

// Per-pixel explicit saliency: sum over co-occurring class pairs of the prior,
// gathered per present class and min-max normalized (constant maps -> zeros).
SaliencyMap explicit_saliency(const LabelMap& labels, const ExplicitPriorTable& table);

// Text serialization: header `n_c epsilon n_t`, then n_c rows of n_c priors
// at 17 significant digits (lossless for binary64).
void save_prior_table(const ExplicitPriorTable& table, const std::filesystem::path& path);
ExplicitPriorTable load_prior_table(const std::filesystem::path& path);

}  // namespace sempri

#endif
