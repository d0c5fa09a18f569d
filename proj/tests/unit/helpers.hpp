#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "lexbias/types.hpp"

namespace testutil {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(LEXBIAS_FIXTURES) / name;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path() / ("lexbias-" + tag + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline lexbias::Segment segment(const std::string& text, std::size_t start, std::size_t end,
                                const std::string& surface) {
  return {text, {start, end}, surface};
}

inline lexbias::Instance pair(const std::string& id, lexbias::Segment a, lexbias::Segment b, bool gold,
                              const std::string& word_key) {
  lexbias::Instance inst;
  inst.id = id;
  inst.task_kind = lexbias::TaskKind::pair_classification;
  inst.segments = {std::move(a), std::move(b)};
  inst.gold = lexbias::Label::binary(gold);
  inst.word_key = word_key;
  return inst;
}

// WiC example: breed / breed, gold F.
inline lexbias::Instance breed_pair() {
  return pair("wic-breed", segment("Google represents a new breed of entrepreneurs .", 24, 29, "breed"),
              segment("The breed of tulip .", 4, 9, "breed"), false, "breed");
}

inline lexbias::Instance kill_pair() {
  return pair("wic-kill", segment("Kill the engine .", 0, 4, "Kill"), segment("He kills the ball .", 3, 8, "kills"), false,
              "kill");
}

}  // namespace testutil
