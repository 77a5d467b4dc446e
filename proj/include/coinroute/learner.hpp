#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coinroute {

/// Bounded store of (input vector, observed reward) pairs for one neuron.
/// Inputs all share the dimension fixed at construction (one slot per
/// outgoing link). When a capacity is set, inserting into a full memory
/// evicts the oldest sample.
class LearnerMemory {
 public:
  struct Sample {
    std::vector<double> input;
    double reward = 0.0;
  };

  explicit LearnerMemory(std::size_t dimension,
                         std::optional<std::size_t> capacity = std::nullopt)
      : dimension_(dimension), capacity_(capacity) {
    if (dimension == 0) throw std::invalid_argument("dimension must be >= 1");
    if (capacity && *capacity == 0)
      throw std::invalid_argument("capacity must be >= 1");
  }

  std::size_t dimension() const { return dimension_; }
  std::optional<std::size_t> capacity() const { return capacity_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const std::deque<Sample>& samples() const { return samples_; }

  friend void nn_update(LearnerMemory& memory, std::vector<double> input,
                        double reward);

 private:
  std::size_t dimension_;
  std::optional<std::size_t> capacity_;
  std::deque<Sample> samples_;
};

/// Appends a sample, evicting the oldest one first when the memory is full.
inline void nn_update(LearnerMemory& memory, std::vector<double> input,
                      double reward) {
  if (input.size() != memory.dimension_)
    throw std::invalid_argument(
        "nn_update: input dimension " + std::to_string(input.size()) +
        " does not match memory dimension " +
        std::to_string(memory.dimension_));
  if (memory.capacity_ && memory.samples_.size() == *memory.capacity_)
    memory.samples_.pop_front();
  memory.samples_.push_back({std::move(input), reward});
}

/// Reward stored with the sample nearest the query in Euclidean distance.
/// Distance ties keep the earliest-inserted sample.
inline double nn_predict(const LearnerMemory& memory,
                         const std::vector<double>& query) {
  if (memory.empty())
    throw std::invalid_argument("nn_predict: empty memory");
  if (query.size() != memory.dimension())
    throw std::invalid_argument(
        "nn_predict: query dimension " + std::to_string(query.size()) +
        " does not match memory dimension " +
        std::to_string(memory.dimension()));
  double best_distance = 0.0;
  const double* best_reward = nullptr;
  for (const LearnerMemory::Sample& sample : memory.samples()) {
    double distance = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) {
      const double diff = sample.input[i] - query[i];
      distance += diff * diff;
    }
    if (!best_reward || distance < best_distance) {
      best_distance = distance;
      best_reward = &sample.reward;
    }
  }
  return *best_reward;
}

}  // namespace coinroute
