#pragma once

#include <span>
#include <vector>

#include "vasc/grid.hpp"

namespace vasc {

/// Default binarization thresholds for the multi-threshold passes.
inline const std::vector<int> kDefaultThresholds{20, 40, 60, 80, 100, 120, 140, 160, 180, 200, 220, 240};

/// Foreground iff value >= threshold.
BinaryMask binarize(const LikelihoodMap& map, int threshold);

/// Exact Euclidean distance from every foreground pixel to the nearest
/// background pixel. Pixels outside the image count as background, so a
/// fully foreground mask gets its distance to the border.
ScalarField distance_transform(const BinaryMask& mask);

/// Distance-transform based half-width: max(dt - offset, 0) on foreground,
/// 0 on background. With offset 0.5 this measures to the pixel boundary
/// rather than to the centre of the first background pixel.
ScalarField boundary_distance(const BinaryMask& mask, double offset = 0.5);

/// Zhang-Suen two-subiteration thinning. Each deletion is re-checked as a
/// simple point against the live image, so 8-connected component count is
/// always preserved.
BinaryMask thin(const BinaryMask& mask);

/// Number of 8-connected foreground components.
int count_components(const BinaryMask& mask);

/// Throws ConfigError unless thresholds are strictly increasing in [0,255].
void validate_thresholds(std::span<const int> thresholds);

/// Normalized background distance field:
///   B += log(1 + dt(seg_t) * i^2)  if i > 5
///   B += log(1 + dt(seg_t))        otherwise
/// where i = index_base + position of t in the list.
ScalarField background_distance_field(const LikelihoodMap& map, std::span<const int> thresholds,
                                      int index_base = 0);

/// Continues an accumulation started on a prefix of the threshold list.
/// `first_position` is the list position of thresholds[0].
void accumulate_background_distance(ScalarField& field, const LikelihoodMap& map,
                                    std::span<const int> thresholds, int first_position,
                                    int index_base = 0);

}  // namespace vasc
