#include "vidsearch/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "vidsearch/errors.hpp"

namespace vidsearch {

void EpisodeParams::validate() const {
  if (!(duration >= 60.0)) throw RejectedInput("episode duration must be at least 60 s");
  if (evidence_count < 1) throw RejectedInput("evidence_count must be at least 1");
  if (!(tightness >= 0.0 && tightness <= 1.0)) throw RejectedInput("tightness must lie in [0, 1]");
  SimProfile{0, reward_noise_sigma, similarity_noise_sigma}.validate();
  if (answer_threshold && (*answer_threshold < 1 ||
                           static_cast<std::size_t>(*answer_threshold) > evidence_count)) {
    throw RejectedInput("answer_threshold must lie in [1, evidence_count]");
  }
  if (!(reveal_radius >= 0.0)) throw RejectedInput("reveal_radius must be non-negative");
  if (distractors < 0) throw RejectedInput("distractors must be non-negative");
  if (option_count < 2 || option_count > 26) throw RejectedInput("option_count must lie in [2, 26]");
}

namespace {

// Draws from the raw engine output only, so episodes do not depend on how
// the standard library implements its distributions.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

constexpr const char* kColours[] = {"red", "blue", "green", "yellow", "white", "black", "orange", "grey"};
constexpr const char* kThings[] = {"car", "umbrella", "dog", "bicycle", "kettle", "backpack",
                                   "ladder", "guitar", "laptop", "boat", "lamp", "ball"};
constexpr const char* kStates[] = {"parked", "on the table", "near the door", "being carried",
                                   "on the floor", "by the window", "in the rain", "under the bench"};

template <class T, std::size_t N>
const T& pick(Draws& d, const T (&items)[N]) {
  return items[d.index(N)];
}

}  // namespace

SyntheticEpisode generate_episode(std::uint64_t seed, const EpisodeParams& params) {
  params.validate();
  Draws draws(seed);
  const double duration = std::floor(params.duration);

  auto world = std::make_shared<SimWorld>();
  world->video = VideoMeta::uniform("sim-" + std::to_string(seed), duration);
  world->noise = SimProfile{seed, params.reward_noise_sigma, params.similarity_noise_sigma};
  world->reveal_radius = params.reveal_radius;

  // Window-centre lattice strictly inside the video.
  std::vector<double> lattice;
  for (double c = world->window_step; c < duration; c += world->window_step) lattice.push_back(c);
  const std::size_t k = params.evidence_count;
  if (k > lattice.size()) {
    throw RejectedInput("cannot place " + std::to_string(k) + " evidence frames on " +
                        std::to_string(lattice.size()) + " lattice points");
  }

  // A window of (1 - tightness) of the lattice, never narrower than k points.
  const auto span = std::max<std::size_t>(
      k, static_cast<std::size_t>(std::ceil((1.0 - params.tightness) * static_cast<double>(lattice.size()))));
  const std::size_t first = draws.index(lattice.size() - std::min(span, lattice.size()) + 1);
  std::set<std::size_t> chosen;
  while (chosen.size() < k) chosen.insert(first + draws.index(std::min(span, lattice.size())));
  for (const auto i : chosen) world->evidence.emplace_back(lattice[i]);

  const std::size_t n_initial = std::max<std::size_t>(1, (k + 1) / 2);
  std::set<std::string> texts;
  for (std::size_t j = 0; j < k; ++j) {
    std::string text;
    do {
      text = std::string(pick(draws, kColours)) + " " + pick(draws, kThings) + " " + pick(draws, kStates);
    } while (!texts.insert(text).second);
    SimQuery q{.text = text, .evidence = j, .initial = j < n_initial};
    q.peaks.push_back({world->evidence[j], 0.9});
    for (int d = 0; d < params.distractors; ++d) {
      q.peaks.push_back({Timestamp(lattice[draws.index(lattice.size())]), draws.uniform(0.55, 0.8)});
    }
    if (!q.initial) q.trigger = j - n_initial;
    world->queries.push_back(std::move(q));
  }

  const auto n_options = static_cast<std::size_t>(params.option_count);
  world->correct_option = std::string(1, static_cast<char>('A' + draws.index(n_options)));
  world->answer_threshold = params.answer_threshold.value_or(static_cast<int>(k));

  SyntheticEpisode out{seed, world, {}};
  out.instruction.question = "Which description matches what the video shows about the " +
                             world->queries.front().text + "?";
  std::vector<std::string> texts_out;
  for (std::size_t i = 0; i < n_options; ++i) texts_out.push_back("Scenario " + std::to_string(i + 1));
  out.instruction.options = lettered_options(texts_out);
  return out;
}

}  // namespace vidsearch
