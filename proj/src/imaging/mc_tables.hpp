#pragma once

#include <cstdint>

namespace camikit::imaging::detail {

extern const std::uint16_t kEdgeTable[256];
extern const std::int8_t kTriTable[256][16];

// Bourke corner and edge numbering
inline constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                      {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
inline constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                            {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

} // namespace camikit::imaging::detail
