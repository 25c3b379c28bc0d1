#pragma once

// Backends that replay a fixed script of responses. Used for fixtures and
// contract tests; every request is recorded for inspection.

#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidsearch/backends/interfaces.hpp"

namespace vidsearch {

template <class Result, class Request>
class Script {
 public:
  using Step = std::function<Result(const Request&)>;

  void push(Step step) {
    std::lock_guard lock(mu_);
    steps_.push_back(std::move(step));
  }
  void push_value(Result value) {
    push([value](const Request&) { return value; });
  }
  template <class Error>
  void push_error(Error error) {
    push([error](const Request&) -> Result { throw error; });
  }

  // Runs the next step; throws std::logic_error once the script is exhausted.
  Result next(const Request& request) {
    Step step;
    {
      std::lock_guard lock(mu_);
      requests_.push_back(request);
      if (steps_.empty()) throw std::logic_error("scripted backend ran out of steps");
      step = std::move(steps_.front());
      steps_.pop_front();
    }
    return step(request);
  }

  std::size_t remaining() const {
    std::lock_guard lock(mu_);
    return steps_.size();
  }
  std::vector<Request> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

 private:
  mutable std::mutex mu_;
  std::deque<Step> steps_;
  std::vector<Request> requests_;
};

class ScriptedExtractor : public QueryExtractor {
 public:
  Script<std::vector<std::string>, Instruction> generate_script;
  Script<std::vector<std::string>, QueryUpdateRequest> update_script;

  std::vector<std::string> generate(const Instruction& instruction) override {
    return generate_script.next(instruction);
  }
  std::vector<std::string> update(const QueryUpdateRequest& request) override {
    return update_script.next(request);
  }
};

// Fixed clips per normalized query text; unknown queries yield no clips.
class ScriptedRetriever : public ClipRetriever {
 public:
  std::map<std::string, std::vector<RetrievedClip>> clips;

  std::vector<RetrievedClip> retrieve(const SemanticQuery& query, std::size_t top_k) override {
    auto it = clips.find(query.normalized_text);
    if (it == clips.end()) return {};
    std::vector<RetrievedClip> out = it->second;
    if (out.size() > top_k) out.erase(out.begin() + static_cast<std::ptrdiff_t>(top_k), out.end());
    return out;
  }
};

class ScriptedRewardModel : public SegmentRewardModel {
 public:
  Script<RewardResponse, RewardRequest> script;

  RewardResponse evaluate(const RewardRequest& request) override { return script.next(request); }
};

class ScriptedPolicy : public PolicyModel {
 public:
  Script<std::string, PolicyRequest> script;

  std::string decide(const PolicyRequest& request) override { return script.next(request); }
};

// Convenience: a reward response with the given raw scores and explanations.
RewardResponse scripted_rewards(const std::vector<int>& scores,
                                const std::vector<std::string>& explanations = {});

}  // namespace vidsearch
