#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eaten/image.hpp"

namespace eaten {

// What the generator actually did to one sample; kept for reproducibility
// audits, never consumed by the model.
struct GenMeta {
  uint64_t seed = 0;
  int template_id = -1;  // template_set layouts only
  double rotation_deg = 0.0;
  bool elastic_applied = false;
  std::vector<std::string> noise_applied;
  std::map<std::string, std::pair<int, int>> positions;  // entity -> top-left
  std::vector<std::string> occluded;                     // entities rendered blank
};

// One document image with its per-entity target strings. An empty target
// means the entity is absent from the document.
struct Sample {
  std::string id;
  Image image;
  std::map<std::string, std::string> targets;
  GenMeta meta;
};

}  // namespace eaten
