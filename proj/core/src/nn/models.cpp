#include "ivusim/nn/models.hpp"

#include <sstream>

namespace ivusim::nn {
namespace {

template <typename T>
LayerPtr<T> conv(std::size_t in, std::size_t out, std::size_t k, std::size_t stride,
                 const std::string& name) {
  return std::make_unique<Conv2d<T>>(ConvSpec{in, out, k, stride, k / 2}, name);
}

template <typename T>
Sequential<T> residual_body(std::size_t width, bool bn, const std::string& name) {
  Sequential<T> body;
  body.add(conv<T>(width, width, 3, 1, name + ".conv1"));
  if (bn) body.add(std::make_unique<BatchNorm2d<T>>(width, name + ".bn1"));
  body.add(std::make_unique<Relu<T>>());
  body.add(conv<T>(width, width, 3, 1, name + ".conv2"));
  if (bn) body.add(std::make_unique<BatchNorm2d<T>>(width, name + ".bn2"));
  return body;
}

std::vector<std::size_t> to_sizes(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  for (double d : v) {
    if (!(d >= 1.0) || d != static_cast<double>(static_cast<std::size_t>(d))) {
      throw ValidationError("model config: widths must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(d));
  }
  return out;
}

std::vector<double> to_doubles(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

std::size_t positive(const KvConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.get_int(key, static_cast<long long>(fallback));
  if (v < 1) throw ValidationError("model config: " + key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "/" : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

const std::vector<std::string>& model_config_keys() {
  static const std::vector<std::string> keys = {
      "g1.image_size", "g1.width",   "g1.blocks",      "g1.batch_norm",    "d1.widths",
      "d1.stride1",    "d1.stride2", "d1.per_patch",   "d1.leak",          "g2.width",
      "g2.blocks",     "g2.up_widths", "g2.batch_norm", "d2.widths",        "d2.head_channels",
      "d2.batch_norm", "d2.leak"};
  return keys;
}

RefinerConfig RefinerConfig::from_config(const KvConfig& cfg) {
  RefinerConfig c;
  c.image_size = positive(cfg, "g1.image_size", c.image_size);
  c.width = positive(cfg, "g1.width", c.width);
  c.blocks = static_cast<std::size_t>(cfg.get_int("g1.blocks", static_cast<long long>(c.blocks)));
  c.batch_norm = cfg.get_bool("g1.batch_norm", c.batch_norm);
  return c;
}

Discriminator1Config Discriminator1Config::from_config(const KvConfig& cfg) {
  Discriminator1Config c;
  c.image_size = positive(cfg, "g1.image_size", c.image_size);
  c.widths = to_sizes(cfg.get_doubles("d1.widths", to_doubles(c.widths)));
  c.stride1 = positive(cfg, "d1.stride1", c.stride1);
  c.stride2 = positive(cfg, "d1.stride2", c.stride2);
  c.per_patch = cfg.get_bool("d1.per_patch", c.per_patch);
  c.leak = cfg.get_double("d1.leak", c.leak);
  return c;
}

Generator2Config Generator2Config::from_config(const KvConfig& cfg) {
  Generator2Config c;
  c.input_size = positive(cfg, "g1.image_size", c.input_size);
  c.width = positive(cfg, "g2.width", c.width);
  c.blocks = static_cast<std::size_t>(cfg.get_int("g2.blocks", static_cast<long long>(c.blocks)));
  c.up_widths = to_sizes(cfg.get_doubles("g2.up_widths", to_doubles(c.up_widths)));
  c.batch_norm = cfg.get_bool("g2.batch_norm", c.batch_norm);
  return c;
}

Discriminator2Config Discriminator2Config::from_config(const KvConfig& cfg) {
  Discriminator2Config c;
  c.image_size = 4 * positive(cfg, "g1.image_size", c.image_size / 4);
  c.widths = to_sizes(cfg.get_doubles("d2.widths", to_doubles(c.widths)));
  c.head_channels = positive(cfg, "d2.head_channels", c.head_channels);
  c.batch_norm = cfg.get_bool("d2.batch_norm", c.batch_norm);
  c.leak = cfg.get_double("d2.leak", c.leak);
  return c;
}

// ---------------------------------------------------------------------------

template <typename T>
std::vector<Parameter<T>*> Network<T>::parameters() {
  std::vector<Parameter<T>*> p;
  std::vector<Tensor<T>*> b;
  collect(p, b);
  return p;
}

template <typename T>
std::vector<Tensor<T>*> Network<T>::buffers() {
  std::vector<Parameter<T>*> p;
  std::vector<Tensor<T>*> b;
  collect(p, b);
  return b;
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto* p : parameters()) p->grad.fill(T(0));
}

template <typename T>
void Network<T>::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  init_parameters(parameters(), rng);
}

template <typename T>
std::size_t count_params(Network<T>& net) {
  std::size_t n = 0;
  for (auto* p : net.parameters()) n += p->value.size();
  return n;
}

template <typename T>
std::size_t count_params(Layer<T>& layer) {
  std::vector<Parameter<T>*> ps;
  layer.collect_parameters(ps);
  std::size_t n = 0;
  for (auto* p : ps) n += p->value.size();
  return n;
}

template <typename T>
void require_image_batch(const Tensor<T>& x, std::size_t size, const char* who) {
  const Shape& s = x.shape();
  if (s.n < 1 || s.c != 1 || s.h != size || s.w != size) {
    throw ShapeError(std::string(who) + ": expected Nx1x" + std::to_string(size) + "x" +
                     std::to_string(size) + " (N >= 1), got " + s.str());
  }
  for (T v : x.values()) {
    if (!std::isfinite(static_cast<double>(v))) {
      throw ValidationError(std::string(who) + ": non-finite input value");
    }
  }
}

template <typename T>
std::vector<double> probabilities(const Tensor<T>& logits) {
  std::vector<double> out;
  out.reserve(logits.size());
  for (T z : logits.values()) out.push_back(static_cast<double>(BoundedSigmoid<T>::apply(z)));
  return out;
}

// ---------------------------------------------------------------------------
// RefinerG1

template <typename T>
RefinerG1<T>::RefinerG1(RefinerConfig cfg) : cfg_(cfg) {
  if (cfg_.image_size < 1 || cfg_.width < 1) throw ValidationError("g1: empty configuration");
  net_.add(conv<T>(1, cfg_.width, 3, 1, "g1.entry"));
  if (cfg_.batch_norm) net_.add(std::make_unique<BatchNorm2d<T>>(cfg_.width, "g1.entry_bn"));
  net_.add(std::make_unique<Relu<T>>(), "entry");
  for (std::size_t b = 0; b < cfg_.blocks; ++b) {
    const auto name = "g1.block" + std::to_string(b);
    net_.add(std::make_unique<Residual<T>>(residual_body<T>(cfg_.width, cfg_.batch_norm, name)),
             "block" + std::to_string(b));
  }
  net_.add(conv<T>(cfg_.width, 1, 1, 1, "g1.exit"));
  net_.add(std::make_unique<BoundedSigmoid<T>>(), "output");
}

template <typename T>
Tensor<T> RefinerG1<T>::forward(const Tensor<T>& x, Mode mode) {
  require_image_batch(x, cfg_.image_size, "g1_forward");
  return net_.forward(x, mode);
}

template <typename T>
Tensor<T> RefinerG1<T>::backward(const Tensor<T>& grad_out) {
  return net_.backward(grad_out);
}

template <typename T>
std::string RefinerG1<T>::describe() const {
  std::ostringstream s;
  s << "g1:size=" << cfg_.image_size << ",width=" << cfg_.width << ",blocks=" << cfg_.blocks
    << ",bn=" << cfg_.batch_norm;
  return s.str();
}

template <typename T>
void RefinerG1<T>::collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) {
  net_.collect_parameters(p);
  net_.collect_buffers(b);
}

// ---------------------------------------------------------------------------
// DiscriminatorD1

template <typename T>
DiscriminatorD1<T>::DiscriminatorD1(Discriminator1Config cfg) : cfg_(std::move(cfg)) {
  if (cfg_.widths.size() != 4) throw ValidationError("d1: expected 4 hidden widths");
  const std::size_t reduction = cfg_.stride1 * cfg_.stride2 * 4;
  if (cfg_.image_size % reduction != 0 || cfg_.image_size < reduction) {
    throw ValidationError("d1: image size must be a multiple of " + std::to_string(reduction));
  }
  const T leak = static_cast<T>(cfg_.leak);
  const auto& w = cfg_.widths;
  net_.add(conv<T>(1, w[0], 3, cfg_.stride1, "d1.conv1"));
  net_.add(std::make_unique<Relu<T>>(leak));
  net_.add(conv<T>(w[0], w[1], 3, cfg_.stride2, "d1.conv2"));
  net_.add(std::make_unique<Relu<T>>(leak));
  net_.add(std::make_unique<MaxPool2<T>>(), "pool1");
  net_.add(conv<T>(w[1], w[2], 3, 1, "d1.conv3"));
  net_.add(std::make_unique<Relu<T>>(leak));
  net_.add(std::make_unique<MaxPool2<T>>(), "pool2");
  net_.add(conv<T>(w[2], w[3], 1, 1, "d1.conv4"));
  net_.add(std::make_unique<Relu<T>>(leak));
  net_.add(conv<T>(w[3], 1, 1, 1, "d1.conv5"), "logit_map");
  if (!cfg_.per_patch) net_.add(std::make_unique<GlobalAvgPool<T>>(), "logit");
}

template <typename T>
Tensor<T> DiscriminatorD1<T>::forward(const Tensor<T>& x, Mode mode) {
  require_image_batch(x, cfg_.image_size, "d1_forward");
  return net_.forward(x, mode);
}

template <typename T>
Tensor<T> DiscriminatorD1<T>::backward(const Tensor<T>& grad_out) {
  return net_.backward(grad_out);
}

template <typename T>
std::string DiscriminatorD1<T>::describe() const {
  std::ostringstream s;
  s << "d1:size=" << cfg_.image_size << ",widths=" << join(cfg_.widths) << ",strides="
    << cfg_.stride1 << "/" << cfg_.stride2 << ",patch=" << cfg_.per_patch;
  return s.str();
}

template <typename T>
void DiscriminatorD1<T>::collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) {
  net_.collect_parameters(p);
  net_.collect_buffers(b);
}

// ---------------------------------------------------------------------------
// GeneratorG2

template <typename T>
GeneratorG2<T>::GeneratorG2(Generator2Config cfg) : cfg_(std::move(cfg)) {
  if (cfg_.input_size % 4 != 0 || cfg_.input_size < 4) {
    throw ValidationError("g2: input size must be a positive multiple of 4");
  }
  if (cfg_.up_widths.size() != 2) throw ValidationError("g2: expected 2 upsampling widths");
  const bool bn = cfg_.batch_norm;
  const std::size_t w = cfg_.width;
  auto conv_bn_relu = [bn](Sequential<T>& s, std::size_t in, std::size_t out, const std::string& name,
                           std::string tag = {}) {
    s.add(conv<T>(in, out, 3, 1, name));
    if (bn) s.add(std::make_unique<BatchNorm2d<T>>(out, name + "_bn"));
    s.add(std::make_unique<Relu<T>>(), std::move(tag));
  };

  conv_bn_relu(entry_, 1, w, "g2.entry", "entry");

  down_.add(std::make_unique<MaxPool2<T>>(), "pool1");
  conv_bn_relu(down_, w, w, "g2.down");
  down_.add(std::make_unique<MaxPool2<T>>(), cfg_.blocks == 0 ? "bottleneck" : "pool2");
  for (std::size_t b = 0; b < cfg_.blocks; ++b) {
    const auto name = "g2.block" + std::to_string(b);
    down_.add(std::make_unique<Residual<T>>(residual_body<T>(w, bn, name)),
              b + 1 == cfg_.blocks ? "bottleneck" : "");
  }

  up_low_.add(std::make_unique<Upsample2<T>>());
  conv_bn_relu(up_low_, w, w, "g2.up1");
  up_low_.add(std::make_unique<Upsample2<T>>());
  conv_bn_relu(up_low_, w, w, "g2.up2", "skip_join");

  up_high_.add(std::make_unique<Upsample2<T>>());
  conv_bn_relu(up_high_, w, cfg_.up_widths[0], "g2.up3");
  up_high_.add(std::make_unique<Upsample2<T>>());
  conv_bn_relu(up_high_, cfg_.up_widths[0], cfg_.up_widths[1], "g2.up4");
  up_high_.add(conv<T>(cfg_.up_widths[1], 1, 3, 1, "g2.exit"));
  up_high_.add(std::make_unique<BoundedSigmoid<T>>(), "output");
}

template <typename T>
Tensor<T> GeneratorG2<T>::forward(const Tensor<T>& x, Mode mode) {
  require_image_batch(x, cfg_.input_size, "g2_forward");
  Tensor<T> e = entry_.forward(x, mode);
  Tensor<T> u = up_low_.forward(down_.forward(e, mode), mode);
  add_inplace(u, e);
  return up_high_.forward(u, mode);
}

template <typename T>
Tensor<T> GeneratorG2<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> gu = up_high_.backward(grad_out);
  Tensor<T> ge = down_.backward(up_low_.backward(gu));
  add_inplace(ge, gu);
  return entry_.backward(ge);
}

template <typename T>
std::string GeneratorG2<T>::describe() const {
  std::ostringstream s;
  s << "g2:size=" << cfg_.input_size << ",width=" << cfg_.width << ",blocks=" << cfg_.blocks
    << ",up=" << join(cfg_.up_widths) << ",bn=" << cfg_.batch_norm;
  return s.str();
}

template <typename T>
void GeneratorG2<T>::set_trace(TraceHook hook) {
  entry_.set_trace(hook);
  down_.set_trace(hook);
  up_low_.set_trace(hook);
  up_high_.set_trace(std::move(hook));
}

template <typename T>
void GeneratorG2<T>::collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) {
  for (auto* s : {&entry_, &down_, &up_low_, &up_high_}) {
    s->collect_parameters(p);
    s->collect_buffers(b);
  }
}

// ---------------------------------------------------------------------------
// DiscriminatorD2

template <typename T>
DiscriminatorD2<T>::DiscriminatorD2(Discriminator2Config cfg) : cfg_(std::move(cfg)) {
  std::size_t blocks = 0;
  std::size_t s = cfg_.image_size;
  while (s > 4 && s % 2 == 0) {
    s /= 2;
    ++blocks;
  }
  if (s != 4) throw ValidationError("d2: image size must be 4 * 2^k");
  if (cfg_.widths.size() != blocks) {
    throw ValidationError("d2: need " + std::to_string(blocks) + " block widths for size " +
                          std::to_string(cfg_.image_size));
  }
  const T leak = static_cast<T>(cfg_.leak);
  std::size_t in = 1;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto name = "d2.down" + std::to_string(b);
    net_.add(conv<T>(in, cfg_.widths[b], 3, 2, name));
    if (cfg_.batch_norm && b > 0) net_.add(std::make_unique<BatchNorm2d<T>>(cfg_.widths[b], name + "_bn"));
    net_.add(std::make_unique<Relu<T>>(leak), b + 1 == blocks ? "prehead" : "");
    in = cfg_.widths[b];
  }
  net_.add(conv<T>(in, cfg_.head_channels, 1, 1, "d2.head"));
  net_.add(std::make_unique<Relu<T>>(leak));
  net_.add(std::make_unique<Linear<T>>(cfg_.head_channels * 16, 1, "d2.fc"), "logit");
}

template <typename T>
Tensor<T> DiscriminatorD2<T>::forward(const Tensor<T>& x, Mode mode) {
  require_image_batch(x, cfg_.image_size, "d2_forward");
  return net_.forward(x, mode);
}

template <typename T>
Tensor<T> DiscriminatorD2<T>::backward(const Tensor<T>& grad_out) {
  return net_.backward(grad_out);
}

template <typename T>
std::string DiscriminatorD2<T>::describe() const {
  std::ostringstream s;
  s << "d2:size=" << cfg_.image_size << ",widths=" << join(cfg_.widths)
    << ",head=" << cfg_.head_channels << ",bn=" << cfg_.batch_norm;
  return s.str();
}

template <typename T>
void DiscriminatorD2<T>::collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) {
  net_.collect_parameters(p);
  net_.collect_buffers(b);
}

#define IVUSIM_INSTANTIATE_MODELS(T)                                              \
  template class Network<T>;                                                      \
  template class RefinerG1<T>;                                                    \
  template class DiscriminatorD1<T>;                                              \
  template class GeneratorG2<T>;                                                  \
  template class DiscriminatorD2<T>;                                              \
  template std::size_t count_params<T>(Network<T>&);                              \
  template std::size_t count_params<T>(Layer<T>&);                                \
  template void require_image_batch<T>(const Tensor<T>&, std::size_t, const char*); \
  template std::vector<double> probabilities<T>(const Tensor<T>&);

IVUSIM_INSTANTIATE_MODELS(float)
IVUSIM_INSTANTIATE_MODELS(double)

}  // namespace ivusim::nn
