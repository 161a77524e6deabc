#ifndef SEMPRI_SEMANTICS_HPP
#define SEMPRI_SEMANTICS_HPP

#include <cstdint>
#include <vector>

#include "sempri/core.hpp"

namespace sempri {

// Per-pixel argmax over class scores; ties break to the lowest class index.
LabelMap argmax_labels(const SemanticScoreMap& scores);

// Sorted list of class indices that occur at least once in the label map.
std::vector<std::int32_t> present_classes(const LabelMap& labels);

// Presence indicator per class (size num_classes), same predicate as above.
std::vector<std::uint8_t> class_presence(const LabelMap& labels);

}  // namespace sempri

#endif
