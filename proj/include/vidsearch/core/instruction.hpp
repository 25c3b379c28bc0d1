#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vidsearch {

struct Option {
  std::string label;  // "A", "B", ...
  std::string text;
};

// A multiple-choice question about one video.
struct Instruction {
  std::string question;
  std::vector<Option> options;

  bool has_label(std::string_view label) const;
  // "A. first option\nB. second option"
  std::string options_text() const;
};

// Builds options labelled A, B, C, ... from plain texts.
std::vector<Option> lettered_options(const std::vector<std::string>& texts);

}  // namespace vidsearch
