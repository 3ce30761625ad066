#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "eaten/errors.hpp"

namespace eaten {

// Character/index map over a printable alphabet plus two reserved tokens:
// EOS (entity separator and padding) and WARMUP (the discarded buffer step).
// Reserved tokens sit after the alphabet and are never produced by encode().
class CharVocab {
 public:
  CharVocab() = default;

  explicit CharVocab(const std::string& alphabet) : chars_(alphabet.begin(), alphabet.end()) {
    if (chars_.empty()) throw ConfigError("CharVocab: alphabet must be non-empty");
    for (size_t i = 0; i < chars_.size(); ++i) {
      if (!index_.emplace(chars_[i], static_cast<int>(i)).second)
        throw ConfigError(std::string("CharVocab: duplicate character '") + chars_[i] + "'");
    }
  }

  int size() const { return static_cast<int>(chars_.size()) + 2; }
  int alphabet_size() const { return static_cast<int>(chars_.size()); }
  int eos_id() const { return static_cast<int>(chars_.size()); }
  int warmup_id() const { return static_cast<int>(chars_.size()) + 1; }
  const std::vector<char>& chars() const { return chars_; }

  bool contains(char c) const { return index_.count(c) != 0; }

  int encode_char(char c) const {
    auto it = index_.find(c);
    if (it == index_.end())
      throw VocabError(std::string("character '") + c + "' not in vocabulary");
    return it->second;
  }

  std::vector<int> encode(const std::string& s) const {
    std::vector<int> out;
    out.reserve(s.size());
    for (char c : s) out.push_back(encode_char(c));
    return out;
  }

  // Maps alphabet indices back to characters. Reserved tokens are dropped so
  // decoded entity strings never contain them; anything else is rejected.
  std::string decode(const std::vector<int>& ids) const {
    std::string out;
    out.reserve(ids.size());
    for (int id : ids) {
      if (id == eos_id() || id == warmup_id()) continue;
      if (id < 0 || id >= alphabet_size())
        throw VocabError("token index " + std::to_string(id) + " out of range");
      out.push_back(chars_[static_cast<size_t>(id)]);
    }
    return out;
  }

 private:
  std::vector<char> chars_;
  std::unordered_map<char, int> index_;
};

}  // namespace eaten
