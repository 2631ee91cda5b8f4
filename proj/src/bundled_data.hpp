#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace confmetric::bundled {

// One row of the phoneme feature table. Feature strings hold one '0'/'1'
// character per column in table order; `datasets` holds one letter per
// dataset the phoneme was tested in: L (Luce), N (Nicely & Miller),
// H (Hebrew).
struct FeatureRow {
  std::string_view label;
  std::string_view phonological;
  std::string_view articulatory;
  std::string_view datasets;
};

inline constexpr std::array<std::string_view, 12> kPhonologicalFeatures = {
    "cn", "ct", "DR", "st", "vc", "ns", "dr", "an", "lb", "cr", "ds", "lt"};

inline constexpr std::array<std::string_view, 14> kArticulatoryFeatures = {
    "lb", "dn", "al", "pa", "vl", "gl", "pl", "af", "fr", "ns", "lt", "rt", "gd", "vc"};

inline constexpr std::array<FeatureRow, 27> kFeatureTable = {{
    {"p", "100000001000", "10000010000000", "LNH"},
    {"b", "100010001000", "10000010000001", "LNH"},
    {"t", "100000010100", "00100010000000", "LNH"},
    {"d", "100010010100", "00100010000001", "LNH"},
    {"k", "100000100000", "00001010000000", "LNH"},
    {"g", "100010100000", "00001010000001", "LNH"},
    {"tʃ", "101100000110", "00010001000000", "L"},
    {"dʒ", "101110000110", "00010001000001", "L"},
    {"f", "110000001000", "10000000100000", "LNH"},
    {"v", "110010001000", "10000000100001", "LNH"},
    {"θ", "110000010100", "01000000100000", "LN"},
    {"ð", "110010010100", "01000000100001", "LN"},
    {"s", "110100010100", "00100000100000", "LNH"},
    {"z", "110110010100", "00100000100001", "LNH"},
    {"ʃ", "110100000110", "00010000100000", "LNH"},
    {"ʒ", "110110000110", "00010000100001", "N"},
    {"h", "110000000000", "00000100100000", "LNH"},
    {"m", "100011001000", "10000000010001", "LNH"},
    {"n", "100011010100", "00100000010001", "LNH"},
    {"ŋ", "100011100000", "00001000010001", "L"},
    {"l", "110010010101", "00100000001001", "LH"},
    {"r", "110010000100", "00100000000101", "L"},
    {"w", "010010101000", "10000000000011", "L"},
    {"j", "010010000110", "00010000000011", "LH"},
    {"χ", "110000100000", "00001000100000", "H"},
    {"ts", "101100010100", "00100001000000", "H"},
    {"ʁ", "110010100000", "00001000000101", "H"},
}};

// Hebrew consonant confusions (AXB, white noise at -12 dB SNR). Row i,
// column j counts stimuli i identified as j.
inline constexpr std::array<std::string_view, 19> kHebrewLabels = {
    "b", "g", "d", "h", "v", "z", "χ", "t", "j", "k",
    "l", "m", "n", "s", "f", "p", "ts", "ʁ", "ʃ"};

inline constexpr std::array<std::array<std::int64_t, 19>, 19> kHebrewConfusions = {{
    {282, 8, 4, 6, 14, 10, 15, 10, 4, 14, 3, 4, 4, 11, 9, 5, 10, 4, 18},
    {8, 279, 5, 2, 8, 6, 6, 12, 4, 5, 6, 2, 4, 5, 6, 4, 0, 5, 18},
    {10, 12, 213, 7, 7, 8, 10, 4, 3, 15, 3, 0, 9, 7, 10, 6, 12, 1, 9},
    {8, 2, 3, 385, 5, 4, 9, 7, 1, 11, 0, 19, 9, 1, 7, 9, 7, 15, 8},
    {5, 2, 1, 6, 215, 7, 2, 10, 5, 3, 4, 5, 1, 10, 3, 0, 5, 9, 10},
    {7, 8, 11, 4, 6, 250, 3, 8, 3, 4, 5, 8, 5, 12, 2, 0, 5, 9, 3},
    {13, 7, 7, 5, 12, 5, 323, 4, 2, 6, 3, 6, 7, 2, 2, 6, 7, 2, 1},
    {2, 6, 17, 0, 2, 4, 3, 310, 2, 0, 6, 0, 0, 6, 1, 6, 10, 5, 6},
    {1, 6, 6, 1, 4, 6, 1, 1, 380, 1, 8, 2, 4, 3, 0, 0, 1, 1, 4},
    {7, 12, 0, 4, 28, 9, 3, 15, 8, 292, 4, 1, 8, 16, 10, 5, 13, 4, 13},
    {4, 1, 4, 3, 1, 5, 5, 2, 3, 1, 414, 5, 1, 5, 0, 1, 9, 2, 3},
    {3, 2, 5, 10, 4, 0, 7, 1, 2, 3, 1, 307, 2, 3, 6, 0, 1, 3, 2},
    {2, 2, 1, 0, 1, 6, 3, 3, 2, 1, 1, 11, 279, 0, 1, 0, 2, 10, 2},
    {8, 25, 10, 4, 5, 3, 6, 7, 7, 6, 3, 4, 6, 301, 8, 6, 20, 6, 17},
    {5, 4, 3, 1, 8, 7, 4, 11, 5, 8, 1, 3, 5, 6, 309, 11, 3, 2, 5},
    {7, 4, 1, 5, 10, 3, 12, 2, 2, 7, 1, 14, 10, 5, 5, 370, 2, 2, 1},
    {8, 30, 8, 2, 11, 1, 5, 9, 10, 1, 2, 2, 6, 0, 9, 7, 343, 5, 10},
    {1, 7, 3, 0, 9, 0, 1, 1, 5, 6, 5, 8, 2, 2, 4, 9, 1, 389, 1},
    {9, 9, 23, 5, 7, 10, 1, 7, 5, 7, 7, 4, 8, 8, 4, 5, 11, 6, 278},
}};

}  // namespace confmetric::bundled
