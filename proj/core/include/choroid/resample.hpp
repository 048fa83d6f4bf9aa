#pragma once

#include "choroid/image.hpp"

namespace choroid {

/// Bilinear resize with corner-aligned sampling:
/// src = dst * (in-1)/(out-1), degenerating to 0 when out == 1.
/// The same convention is used by the model-input resize, the probability-map
/// back-mapping and the network decoder upsampling.
Image resize_bilinear(const Image& in, int out_h, int out_w);

/// Nearest-neighbor resize, corner-aligned (src = round(dst*(in-1)/(out-1))).
/// Preserves binary values; equal dims is an exact identity.
Mask resize_nearest(const Mask& in, int out_h, int out_w);

} // namespace choroid
