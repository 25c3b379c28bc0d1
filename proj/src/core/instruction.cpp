#include "vidsearch/core/instruction.hpp"

#include <algorithm>

namespace vidsearch {

bool Instruction::has_label(std::string_view label) const {
  return std::any_of(options.begin(), options.end(),
                     [&](const Option& o) { return o.label == label; });
}

std::string Instruction::options_text() const {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out += '\n';
    out += options[i].label + ". " + options[i].text;
  }
  return out;
}

std::vector<Option> lettered_options(const std::vector<std::string>& texts) {
  std::vector<Option> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    out.push_back(Option{std::string(1, static_cast<char>('A' + i)), texts[i]});
  }
  return out;
}

}  // namespace vidsearch
