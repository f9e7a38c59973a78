#include "styleseg/segnet.hpp"

#include <json.hpp>

#include <algorithm>

#include "styleseg/tensor_archive.hpp"

namespace styleseg {
namespace nn {

void EncoderConfig::validate() const {
  if (in_channels < 1 || stem_channels < 1 || stage_channels[0] < 1 || stage_channels[1] < 1)
    throw ConfigError("encoder channel counts must be >= 1");
}

void AsppConfig::validate() const {
  for (int r : rates)
    if (r < 1) throw ConfigError("atrous rates must be positive");
  if (rates[0] == rates[1] || rates[0] == rates[2] || rates[1] == rates[2])
    throw ConfigError("atrous rates must be distinct");
  for (double d : head_dropout)
    if (d < 0.0 || d >= 1.0) throw ConfigError("head dropout rates must lie in [0,1)");
  if (classes != kNumLabels) throw ConfigError("segmentation head emits exactly 3 classes");
  if (branch_channels < 1) throw ConfigError("ASPP branch width must be >= 1");
}

Chain::Chain(const Chain& o) {
  ops_.reserve(o.ops_.size());
  for (const auto& op : o.ops_) ops_.push_back(op->clone());
}

Tensor Chain::forward(const Tensor& x, bool train) {
  Tensor cur = x;
  for (auto& op : ops_) cur = op->forward(cur, train);
  return cur;
}

Tensor Chain::backward(const Tensor& grad) {
  Tensor cur = grad;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) cur = (*it)->backward(cur);
  return cur;
}

void Chain::collect_params(std::vector<Param*>& out) {
  for (auto& op : ops_) op->collect_params(out);
}

void Chain::collect_state(std::vector<std::pair<std::string, Tensor*>>& out) {
  for (auto& op : ops_) op->collect_state(out);
}

Tensor SegmentationNet::ResBlock::forward(const Tensor& x, bool train) {
  input_ = x;
  main_out_ = main.forward(x, train);
  skip_out_ = has_skip ? skip.forward(x, train) : x;
  if (!main_out_.same_shape(skip_out_))
    throw ValidationError("residual block: branch shapes diverged");
  Tensor sum = main_out_;
  for (std::size_t i = 0; i < sum.size(); ++i) sum.raw()[i] += skip_out_.raw()[i];
  return relu.forward(sum, train);
}

Tensor SegmentationNet::ResBlock::backward(const Tensor& grad) {
  const Tensor d_sum = relu.backward(grad);
  Tensor dx = main.backward(d_sum);
  if (has_skip) {
    const Tensor ds = skip.backward(d_sum);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.raw()[i] += ds.raw()[i];
  } else {
    for (std::size_t i = 0; i < dx.size(); ++i) dx.raw()[i] += d_sum.raw()[i];
  }
  return dx;
}

void SegmentationNet::ResBlock::collect_params(std::vector<Param*>& out) {
  main.collect_params(out);
  if (has_skip) skip.collect_params(out);
}

void SegmentationNet::ResBlock::collect_state(std::vector<std::pair<std::string, Tensor*>>& out) {
  main.collect_state(out);
  if (has_skip) skip.collect_state(out);
}

SegmentationNet::SegmentationNet(const AsppConfig& aspp, const EncoderConfig& encoder,
                                 std::uint64_t seed)
    : aspp_(aspp), encoder_(encoder), seed_(seed) {
  aspp_.validate();
  encoder_.validate();
  Rng rng(seed);
  build(rng);
}

namespace {

std::unique_ptr<Conv2d> conv(const std::string& name, int in_c, int out_c, int k, int stride,
                             int pad, int dil, Rng& rng) {
  return std::make_unique<Conv2d>(name, in_c, out_c, k, stride, pad, dil, false, rng);
}

}  // namespace

void SegmentationNet::build(Rng& rng) {
  const int stem_c = encoder_.stem_channels;
  const int s1_c = encoder_.stage_channels[0];
  const int s2_c = encoder_.stage_channels[1];

  stem_.add(conv("stem.conv", encoder_.in_channels, stem_c, 3, 2, 1, 1, rng));
  stem_.add(std::make_unique<BatchNorm2d>("stem.bn", stem_c));
  stem_.add(std::make_unique<ReLU>());

  auto make_stage = [&](ResBlock& block, const std::string& name, int in_c, int out_c) {
    block.main.add(conv(name + ".conv1", in_c, out_c, 3, 2, 1, 1, rng));
    block.main.add(std::make_unique<BatchNorm2d>(name + ".bn1", out_c));
    block.main.add(std::make_unique<ReLU>());
    block.main.add(conv(name + ".conv2", out_c, out_c, 3, 1, 1, 1, rng));
    block.main.add(std::make_unique<BatchNorm2d>(name + ".bn2", out_c));
    block.has_skip = true;
    block.skip.add(conv(name + ".proj", in_c, out_c, 1, 2, 0, 1, rng));
    block.skip.add(std::make_unique<BatchNorm2d>(name + ".proj_bn", out_c));
  };
  make_stage(stage1_, "stage1", stem_c, s1_c);
  make_stage(stage2_, "stage2", s1_c, s2_c);

  const int f_c = encoder_.out_channels();
  const int b_c = aspp_.branch_channels;
  for (int i = 0; i < 3; ++i) {
    Chain branch;
    const std::string name = "aspp.rate" + std::to_string(aspp_.rates[i]);
    branch.add(conv(name + ".conv", f_c, b_c, 3, 1, aspp_.rates[i], aspp_.rates[i], rng));
    branch.add(std::make_unique<BatchNorm2d>(name + ".bn", b_c));
    branch.add(std::make_unique<ReLU>());
    aspp_branches_.push_back(std::move(branch));
  }
  if (aspp_.include_1x1) {
    Chain branch;
    branch.add(conv("aspp.point.conv", f_c, b_c, 1, 1, 0, 1, rng));
    branch.add(std::make_unique<BatchNorm2d>("aspp.point.bn", b_c));
    branch.add(std::make_unique<ReLU>());
    aspp_branches_.push_back(std::move(branch));
  }
  if (aspp_.include_image_pooling) {
    pool_branch_.add(conv("aspp.pool.conv", f_c, b_c, 1, 1, 0, 1, rng));
    pool_branch_.add(std::make_unique<BatchNorm2d>("aspp.pool.bn", b_c));
    pool_branch_.add(std::make_unique<ReLU>());
  }

  const int cat_c = aspp_.branch_count() * b_c;
  head_.add(conv("head.conv1", cat_c, b_c, 1, 1, 0, 1, rng));
  head_.add(std::make_unique<BatchNorm2d>("head.bn1", b_c));
  head_.add(std::make_unique<ReLU>());
  head_.add(std::make_unique<Dropout>(aspp_.head_dropout[0], rng.next_u64()));
  head_.add(conv("head.conv2", b_c, b_c, 1, 1, 0, 1, rng));
  head_.add(std::make_unique<BatchNorm2d>("head.bn2", b_c));
  head_.add(std::make_unique<ReLU>());
  head_.add(std::make_unique<Dropout>(aspp_.head_dropout[1], rng.next_u64()));
  head_.add(conv("head.logits", b_c, aspp_.classes, 1, 1, 0, 1, rng));
}

Tensor SegmentationNet::forward(const Tensor& x, bool train) {
  input_size_ = {x.h(), x.w()};
  Tensor f = stem_.forward(x, train);
  f = stage1_.forward(f, train);
  f = stage2_.forward(f, train);
  feature_size_ = {f.h(), f.w()};

  const int extent = std::min(f.h(), f.w());
  for (int r : aspp_.rates)
    if (r >= extent)
      throw ConfigError("atrous rate " + std::to_string(r) + " >= feature map extent " +
                        std::to_string(extent) + "; enlarge the input or reduce the rates");

  std::vector<Tensor> branch_outs;
  branch_outs.reserve(aspp_.branch_count());
  branch_channels_.clear();
  for (auto& branch : aspp_branches_) {
    branch_outs.push_back(branch.forward(f, train));
    branch_channels_.push_back(branch_outs.back().c());
  }
  used_pool_branch_ = aspp_.include_image_pooling;
  if (used_pool_branch_) {
    Tensor pooled = global_avg_pool(f);
    pooled = pool_branch_.forward(pooled, train);
    branch_outs.push_back(bilinear_resize(pooled, f.h(), f.w()));
    branch_channels_.push_back(branch_outs.back().c());
  }

  Tensor cat = concat_channels(branch_outs);
  Tensor logits = head_.forward(cat, train);
  return bilinear_resize(logits, input_size_[0], input_size_[1]);
}

Tensor SegmentationNet::backward(const Tensor& grad_logits) {
  Tensor g = bilinear_resize_backward(grad_logits, feature_size_[0], feature_size_[1]);
  g = head_.backward(g);
  std::vector<Tensor> branch_grads = split_channels(g, branch_channels_);

  Tensor df(branch_grads[0].n(), encoder_.out_channels(), feature_size_[0], feature_size_[1]);
  for (std::size_t b = 0; b < aspp_branches_.size(); ++b) {
    const Tensor dg = aspp_branches_[b].backward(branch_grads[b]);
    for (std::size_t i = 0; i < df.size(); ++i) df.raw()[i] += dg.raw()[i];
  }
  if (used_pool_branch_) {
    Tensor dp = bilinear_resize_backward(branch_grads.back(), 1, 1);
    dp = pool_branch_.backward(dp);
    const Tensor dg = global_avg_pool_backward(dp, feature_size_[0], feature_size_[1]);
    for (std::size_t i = 0; i < df.size(); ++i) df.raw()[i] += dg.raw()[i];
  }

  Tensor dx = stage2_.backward(df);
  dx = stage1_.backward(dx);
  return stem_.backward(dx);
}

std::vector<Param*> SegmentationNet::params() {
  std::vector<Param*> out;
  stem_.collect_params(out);
  stage1_.collect_params(out);
  stage2_.collect_params(out);
  for (auto& b : aspp_branches_) b.collect_params(out);
  pool_branch_.collect_params(out);
  head_.collect_params(out);
  return out;
}

void SegmentationNet::zero_grads() {
  for (Param* p : params()) p->zero_grad();
}

std::vector<std::pair<std::string, Tensor*>> SegmentationNet::named_state() {
  std::vector<std::pair<std::string, Tensor*>> out;
  stem_.collect_state(out);
  stage1_.collect_state(out);
  stage2_.collect_state(out);
  for (auto& b : aspp_branches_) b.collect_state(out);
  pool_branch_.collect_state(out);
  head_.collect_state(out);
  return out;
}

void SegmentationNet::save(const std::filesystem::path& path,
                           const std::map<std::string, std::string>& extra_meta) const {
  auto& self = const_cast<SegmentationNet&>(*this);
  std::vector<std::pair<std::string, const Tensor*>> items;
  for (const auto& [name, t] : self.named_state()) items.emplace_back(name, t);

  nlohmann::json cfg;
  cfg["aspp"] = {{"rates", aspp_.rates},
                 {"include_1x1", aspp_.include_1x1},
                 {"include_image_pooling", aspp_.include_image_pooling},
                 {"head_dropout", aspp_.head_dropout},
                 {"classes", aspp_.classes},
                 {"branch_channels", aspp_.branch_channels}};
  cfg["encoder"] = {{"in_channels", encoder_.in_channels},
                    {"stem_channels", encoder_.stem_channels},
                    {"stage_channels", encoder_.stage_channels}};
  cfg["seed"] = seed_;
  std::map<std::string, std::string> meta = extra_meta;
  meta["kind"] = "segmentation-net";
  meta["config"] = cfg.dump();
  save_tensor_archive(path, items, meta);
}

void SegmentationNet::load(const std::filesystem::path& path) {
  const NamedTensors archive = load_tensor_archive(path);
  for (auto& [name, t] : named_state()) *t = archive.get(name, t->shape());
}

SegmentationNet SegmentationNet::from_file(const std::filesystem::path& path) {
  const NamedTensors archive = load_tensor_archive(path);
  auto it = archive.meta.find("config");
  if (it == archive.meta.end())
    throw IoError(path.string() + ": checkpoint lacks a config manifest");
  const nlohmann::json cfg = nlohmann::json::parse(it->second);
  AsppConfig aspp;
  aspp.rates = cfg.at("aspp").at("rates").get<std::array<int, 3>>();
  aspp.include_1x1 = cfg.at("aspp").at("include_1x1").get<bool>();
  aspp.include_image_pooling = cfg.at("aspp").at("include_image_pooling").get<bool>();
  aspp.head_dropout = cfg.at("aspp").at("head_dropout").get<std::array<double, 2>>();
  aspp.classes = cfg.at("aspp").at("classes").get<int>();
  aspp.branch_channels = cfg.at("aspp").at("branch_channels").get<int>();
  EncoderConfig enc;
  enc.in_channels = cfg.at("encoder").at("in_channels").get<int>();
  enc.stem_channels = cfg.at("encoder").at("stem_channels").get<int>();
  enc.stage_channels = cfg.at("encoder").at("stage_channels").get<std::array<int, 2>>();
  SegmentationNet net(aspp, enc, cfg.at("seed").get<std::uint64_t>());
  net.load(path);
  return net;
}

}  // namespace nn
}  // namespace styleseg
