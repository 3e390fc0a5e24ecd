#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace pathlab::reference {

struct Row {
    std::size_t path_length;
    double theoretical;
    double experimental;
};

struct Distribution {
    std::uint64_t size;
    std::array<Row, 6> rows;
};

// Previously published pooled observations (10 trials per size) together
// with the six-decimal model column they were printed against. Used as a
// fixed input for the probability-basis chi-square.
inline constexpr std::array<Distribution, 4> published = {{
    {100,
     {{{1, 0.002386, 0.000000},
       {2, 0.690504, 0.684000},
       {3, 0.284479, 0.306000},
       {4, 0.021201, 0.010000},
       {5, 0.001340, 0.000000},
       {6, 0.000084, 0.000000}}}},
    {1'000,
     {{{2, 0.025506, 0.020200},
       {3, 0.769895, 0.763500},
       {4, 0.190395, 0.214300},
       {5, 0.013310, 0.002000},
       {6, 0.000838, 0.000000},
       {7, 0.000052, 0.000000}}}},
    {10'000,
     {{{3, 0.101360, 0.085860},
       {4, 0.765349, 0.786600},
       {5, 0.124390, 0.126340},
       {6, 0.008342, 0.001200},
       {7, 0.000524, 0.000000},
       {8, 0.000033, 0.000000}}}},
    {100'000,
     {{{4, 0.239184, 0.217824},
       {5, 0.675289, 0.712484},
       {6, 0.079954, 0.069361},
       {7, 0.005223, 0.000331},
       {8, 0.000327, 0.000000},
       {9, 0.000020, 0.000000}}}},
}};

} // namespace pathlab::reference
