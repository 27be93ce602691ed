#pragma once

#include <cstdint>

namespace graspkit::mc {

// Classic marching-cubes case tables.
// Corner numbering: 0=(0,0,0) 1=(1,0,0) 2=(1,1,0) 3=(0,1,0)
//                   4=(0,0,1) 5=(1,0,1) 6=(1,1,1) 7=(0,1,1)
// Edge e connects corners kEdgeCorners[e][0..1]. A case index bit is set
// when the corner value is below the iso level.
extern const std::uint16_t kEdgeTable[256];
extern const std::int8_t kTriTable[256][16];
extern const int kEdgeCorners[12][2];
extern const int kCornerOffset[8][3];

}  // namespace graspkit::mc
