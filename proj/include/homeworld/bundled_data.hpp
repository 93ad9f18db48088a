#pragma once

// Bundled copies of data/lexicon_v1.json and data/class_vectors_v1.csv.
// tests/test_data.cpp keeps them byte-identical with the files.

namespace homeworld::bundled {

inline constexpr const char* kLexiconVersion = "lexicon_v1";
inline constexpr const char* kVectorsVersion = "class_vectors_v1";

inline constexpr const char* kLexiconJson =
#include "homeworld/data/lexicon_v1.inc"
    ;

inline constexpr const char* kClassVectorsCsv =
#include "homeworld/data/class_vectors_v1.inc"
    ;

}  // namespace homeworld::bundled
