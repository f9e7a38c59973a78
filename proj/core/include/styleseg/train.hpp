#pragma once

#include <functional>
#include <map>

#include "styleseg/augment.hpp"
#include "styleseg/segnet.hpp"
#include "styleseg/volume.hpp"

namespace styleseg {

struct TrainSchedule {
  int joint_epochs = 20;
  double joint_base_lr = 0.01;
  int finetune_epochs = 20;
  double finetune_base_lr = 0.002;
  int batch_size = 8;
  nn::SgdOptions sgd{0.9, 1e-4};

  void validate() const;
};

// Poly decay: base * (1 - epoch/max_epoch). Strictly positive below
// max_epoch, exactly zero at max_epoch.
double poly_lr(double base, int epoch, int max_epoch);

// Aligned slice/label pairs for one plane of one sample.
struct LabeledStack {
  SliceStack slices;
  SliceStack labels;
};

// plane -> all (slice, label) pairs gathered across samples.
using TrainingSet = std::map<Plane, std::vector<std::pair<const Image2D*, const Image2D*>>>;

TrainingSet collect_training_set(const std::vector<LabeledStack>& stacks);

struct EpochLog {
  std::string stage;  // joint | xy | yz | zx
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  nn::SegmentationNet joint;
  std::map<Plane, nn::SegmentationNet> per_plane;
  std::vector<EpochLog> logs;
  std::uint64_t loss_trace_hash = 0;  // digest of every batch loss, in order
};

// Two-stage schedule: the joint stage trains on the union of all planes;
// stage two clones the result per plane and fine-tunes on that plane only.
// Deterministic given (model, set, schedule, augmentation, seed).
TrainResult train(nn::SegmentationNet model, const TrainingSet& set, const TrainSchedule& sched,
                  const AugmentationConfig& aug, std::uint64_t seed,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace styleseg
