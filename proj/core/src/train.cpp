#include "styleseg/train.hpp"

#include <chrono>
#include <cmath>

namespace styleseg {

void TrainSchedule::validate() const {
  if (joint_epochs < 0 || finetune_epochs < 0)
    throw ValidationError("training epochs must be >= 0");
  if (!(joint_base_lr > 0.0) || !(finetune_base_lr > 0.0))
    throw ValidationError("base learning rates must be > 0");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
}

double poly_lr(double base, int epoch, int max_epoch) {
  if (max_epoch < 1) throw ValidationError("poly lr: max_epoch must be >= 1");
  if (epoch < 0 || epoch > max_epoch) throw ValidationError("poly lr: epoch out of range");
  return base * (1.0 - static_cast<double>(epoch) / max_epoch);
}

TrainingSet collect_training_set(const std::vector<LabeledStack>& stacks) {
  TrainingSet set;
  for (const auto& ls : stacks) {
    ls.slices.validate();
    ls.labels.validate();
    if (ls.slices.plane != ls.labels.plane ||
        ls.slices.slices.size() != ls.labels.slices.size())
      throw ValidationError("training stack '" + ls.slices.source_id +
                            "': slices and labels are misaligned");
    auto& dst = set[ls.slices.plane];
    for (std::size_t i = 0; i < ls.slices.slices.size(); ++i)
      dst.emplace_back(&ls.slices.slices[i], &ls.labels.slices[i]);
  }
  return set;
}

namespace {

struct Sample {
  const Image2D* image;
  const Image2D* label;
};

// One epoch of SGD over `samples`; returns the mean batch loss.
double run_epoch(nn::SegmentationNet& model, std::vector<Sample>& samples,
                 const TrainSchedule& sched, const AugmentationConfig& aug, double lr, Rng& rng,
                 std::vector<double>& batch_losses) {
  // Seeded Fisher-Yates shuffle.
  for (std::size_t i = samples.size(); i > 1; --i)
    std::swap(samples[i - 1], samples[rng.uniform_int(i)]);

  const int in_ch = model.encoder_config().in_channels;
  const auto [ch, cw] = aug.crop_size;
  double loss_sum = 0.0;
  int batches = 0;
  for (std::size_t start = 0; start < samples.size(); start += sched.batch_size) {
    const int b = static_cast<int>(std::min<std::size_t>(sched.batch_size,
                                                         samples.size() - start));
    nn::Tensor input(b, in_ch, ch, cw);
    std::vector<std::uint8_t> targets(static_cast<std::size_t>(b) * ch * cw);
    for (int i = 0; i < b; ++i) {
      const auto& s = samples[start + i];
      const AugmentedPair pair = augment(*s.image, *s.label, aug, rng);
      for (int c = 0; c < in_ch; ++c)
        std::copy(pair.image.raw().begin(), pair.image.raw().end(),
                  input.item(i) + static_cast<std::size_t>(c) * ch * cw);
      for (int p = 0; p < ch * cw; ++p) {
        const double v = pair.label.raw()[p];
        targets[static_cast<std::size_t>(i) * ch * cw + p] = static_cast<std::uint8_t>(v);
      }
    }

    model.zero_grads();
    const nn::Tensor logits = model.forward(input, true);
    const auto ce = nn::softmax_cross_entropy(logits, targets);
    if (!std::isfinite(ce.loss))
      throw DivergenceError("training loss became non-finite (batch " + std::to_string(batches) +
                            ")");
    model.backward(ce.grad);
    nn::sgd_step(model.params(), lr, sched.sgd);
    loss_sum += ce.loss;
    batch_losses.push_back(ce.loss);
    ++batches;
  }
  return batches ? loss_sum / batches : 0.0;
}

double run_stage(nn::SegmentationNet& model, std::vector<Sample>& samples,
                 const TrainSchedule& sched, const AugmentationConfig& aug,
                 const std::string& stage, int epochs, double base_lr, Rng& rng,
                 std::vector<double>& batch_losses, std::vector<EpochLog>& logs,
                 const std::function<void(const EpochLog&)>& on_epoch) {
  double last = 0.0;
  for (int e = 0; e < epochs; ++e) {
    const double lr = poly_lr(base_lr, e, epochs);
    const auto t0 = std::chrono::steady_clock::now();
    double loss;
    try {
      loss = run_epoch(model, samples, sched, aug, lr, rng, batch_losses);
    } catch (const DivergenceError& e_div) {
      throw DivergenceError(std::string(e_div.what()) + " at " + stage + " epoch " +
                            std::to_string(e));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EpochLog log{stage, e, lr, loss, secs};
    logs.push_back(log);
    if (on_epoch) on_epoch(log);
    last = loss;
  }
  return last;
}

}  // namespace

TrainResult train(nn::SegmentationNet model, const TrainingSet& set, const TrainSchedule& sched,
                  const AugmentationConfig& aug, std::uint64_t seed,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  sched.validate();
  aug.validate();
  for (const Plane p : kAllPlanes) {
    auto it = set.find(p);
    if (it == set.end() || it->second.empty())
      throw ValidationError(std::string("training set has no slices for plane ") +
                            plane_name(p));
  }

  std::vector<Sample> joint;
  for (const auto& [plane, pairs] : set)
    for (const auto& [img, lbl] : pairs) joint.push_back({img, lbl});

  std::vector<double> batch_losses;
  TrainResult res{std::move(model), {}, {}, 0};

  Rng rng_joint = Rng(seed).fork("train/joint");
  run_stage(res.joint, joint, sched, aug, "joint", sched.joint_epochs, sched.joint_base_lr,
            rng_joint, batch_losses, res.logs, on_epoch);

  for (const Plane p : kAllPlanes) {
    std::vector<Sample> plane_samples;
    for (const auto& [img, lbl] : set.at(p)) plane_samples.push_back({img, lbl});
    nn::SegmentationNet tuned = res.joint;  // stage-2 starts from stage-1 weights
    Rng rng_plane = Rng(seed).fork(std::string("train/finetune/") + plane_name(p));
    run_stage(tuned, plane_samples, sched, aug, plane_name(p), sched.finetune_epochs,
              sched.finetune_base_lr, rng_plane, batch_losses, res.logs, on_epoch);
    res.per_plane.emplace(p, std::move(tuned));
  }

  res.loss_trace_hash =
      fnv1a64(batch_losses.data(), batch_losses.size() * sizeof(double));
  return res;
}

}  // namespace styleseg
