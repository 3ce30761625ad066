#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "eaten/errors.hpp"
#include "eaten/vocab.hpp"

namespace eaten {

// One decoder: the ordered entities it transcribes and its step budget T_m.
struct DecoderSpec {
  std::vector<std::string> entities;
  int max_steps = 0;
};

// Scenario description: M decoders over I entities, M <= I.
struct EntitySchema {
  std::vector<DecoderSpec> decoders;

  int num_decoders() const { return static_cast<int>(decoders.size()); }

  int num_entities() const {
    int n = 0;
    for (const auto& d : decoders) n += static_cast<int>(d.entities.size());
    return n;
  }

  std::vector<std::string> entity_names() const {
    std::vector<std::string> names;
    for (const auto& d : decoders)
      for (const auto& e : d.entities) names.push_back(e);
    return names;
  }

  int total_steps() const {
    int n = 0;
    for (const auto& d : decoders) n += d.max_steps;
    return n;
  }

  void validate() const {
    if (decoders.empty()) throw SchemaError("schema: need at least one decoder");
    std::set<std::string> seen;
    for (size_t m = 0; m < decoders.size(); ++m) {
      const auto& d = decoders[m];
      if (d.entities.empty())
        throw SchemaError("schema: decoder " + std::to_string(m) + " owns no entities");
      if (d.max_steps < 1)
        throw SchemaError("schema: decoder " + std::to_string(m) + " has max_steps < 1");
      for (const auto& e : d.entities) {
        if (e.empty()) throw SchemaError("schema: empty entity name");
        if (!seen.insert(e).second)
          throw SchemaError("schema: duplicate entity name '" + e + "'");
      }
    }
  }
};

// Per-decoder teacher-forcing targets: entity chars joined by EOS, one EOS
// after each entity, then EOS-padded to exactly max_steps indices.
inline std::vector<std::vector<int>> encode_targets(
    const std::map<std::string, std::string>& targets, const EntitySchema& schema,
    const CharVocab& vocab) {
  for (const auto& [key, _] : targets) {
    bool known = false;
    for (const auto& d : schema.decoders)
      for (const auto& e : d.entities)
        if (e == key) known = true;
    if (!known) throw SchemaError("encode_targets: entity '" + key + "' not in schema");
  }
  std::vector<std::vector<int>> out;
  out.reserve(schema.decoders.size());
  for (size_t m = 0; m < schema.decoders.size(); ++m) {
    const auto& dec = schema.decoders[m];
    std::vector<int> seq;
    size_t content = 0;
    for (const auto& e : dec.entities) {
      auto it = targets.find(e);
      const std::string& s = it == targets.end() ? std::string() : it->second;
      content += s.size();
      for (int id : vocab.encode(s)) seq.push_back(id);
      seq.push_back(vocab.eos_id());
    }
    if (static_cast<int>(seq.size()) > dec.max_steps)
      throw CapacityError("decoder " + std::to_string(m) + ": targets need " +
                          std::to_string(content) + "+" + std::to_string(dec.entities.size()) +
                          " steps but max_steps is " + std::to_string(dec.max_steps));
    seq.resize(static_cast<size_t>(dec.max_steps), vocab.eos_id());
    out.push_back(std::move(seq));
  }
  return out;
}

// Splits a decoded index sequence at EOS tokens into the first n_entities
// segments; missing segments become empty strings, extra material is ignored.
// Total function: any index sequence maps to n_entities strings.
inline std::vector<std::string> split_on_eos(const std::vector<int>& indices, int n_entities,
                                             const CharVocab& vocab) {
  if (n_entities < 1) throw SchemaError("split_on_eos: n_entities must be >= 1");
  std::vector<std::string> segments;
  std::vector<int> current;
  for (int id : indices) {
    if (id == vocab.eos_id()) {
      segments.push_back(vocab.decode(current));
      current.clear();
    } else {
      current.push_back(id);
    }
  }
  if (!current.empty()) segments.push_back(vocab.decode(current));
  segments.resize(static_cast<size_t>(n_entities));
  return segments;
}

}  // namespace eaten
