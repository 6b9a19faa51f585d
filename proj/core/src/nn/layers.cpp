#include "ivusim/nn/layers.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace ivusim::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Unfolds one sample (c, h, w) into a (c*k*k) x (ho*wo) matrix.
template <typename T>
void im2col(const T* img, const Shape& s, const ConvSpec& cs, std::size_t ho, std::size_t wo,
            T* col) {
  const auto k = cs.kernel;
  const auto h = static_cast<std::ptrdiff_t>(s.h);
  const auto w = static_cast<std::ptrdiff_t>(s.w);
  for (std::size_t c = 0; c < s.c; ++c) {
    const T* plane = img + c * s.h * s.w;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* dst = col + ((c * k + ky) * k + kx) * ho * wo;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * cs.stride + ky) -
                          static_cast<std::ptrdiff_t>(cs.pad);
          T* drow = dst + oy * wo;
          if (iy < 0 || iy >= h) {
            std::fill(drow, drow + wo, T(0));
            continue;
          }
          const T* srow = plane + iy * w;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * cs.stride + kx) -
                            static_cast<std::ptrdiff_t>(cs.pad);
            drow[ox] = (ix < 0 || ix >= w) ? T(0) : srow[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, const Shape& s, const ConvSpec& cs, std::size_t ho, std::size_t wo,
            T* img) {
  const auto k = cs.kernel;
  const auto h = static_cast<std::ptrdiff_t>(s.h);
  const auto w = static_cast<std::ptrdiff_t>(s.w);
  for (std::size_t c = 0; c < s.c; ++c) {
    T* plane = img + c * s.h * s.w;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* src = col + ((c * k + ky) * k + kx) * ho * wo;
        for (std::size_t oy = 0; oy < ho; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * cs.stride + ky) -
                          static_cast<std::ptrdiff_t>(cs.pad);
          if (iy < 0 || iy >= h) continue;
          T* drow = plane + iy * w;
          const T* srow = src + oy * wo;
          for (std::size_t ox = 0; ox < wo; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * cs.stride + kx) -
                            static_cast<std::ptrdiff_t>(cs.pad);
            if (ix >= 0 && ix < w) drow[ix] += srow[ox];
          }
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Conv2d

template <typename T>
Conv2d<T>::Conv2d(ConvSpec spec, std::string name)
    : spec_(spec),
      weight_(name + ".weight", Shape{spec.out, spec.in * spec.kernel * spec.kernel, 1, 1}),
      bias_(name + ".bias", Shape{spec.out, 1, 1, 1}) {
  if (spec.in == 0 || spec.out == 0 || spec.kernel == 0 || spec.stride == 0) {
    throw ValidationError("conv " + name + ": zero-sized spec");
  }
}

template <typename T>
Shape Conv2d<T>::out_shape(const Shape& in) const {
  if (in.c != spec_.in) {
    throw ShapeError("conv expects " + std::to_string(spec_.in) + " channels, got " + in.str());
  }
  const std::size_t eh = in.h + 2 * spec_.pad;
  const std::size_t ew = in.w + 2 * spec_.pad;
  if (eh < spec_.kernel || ew < spec_.kernel) throw ShapeError("conv input too small: " + in.str());
  return {in.n, spec_.out, (eh - spec_.kernel) / spec_.stride + 1,
          (ew - spec_.kernel) / spec_.stride + 1};
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, Mode mode) {
  const Shape in = x.shape();
  const Shape os = out_shape(in);
  Tensor<T> y(os);
  const std::size_t kk = spec_.in * spec_.kernel * spec_.kernel;
  const std::size_t hw = os.h * os.w;
  const bool direct = spec_.kernel == 1 && spec_.stride == 1 && spec_.pad == 0;
  AlignedVector<T> col(direct ? 0 : kk * hw);
  ConstMapMat<T> wmat(weight_.value.data(), static_cast<Eigen::Index>(spec_.out),
                      static_cast<Eigen::Index>(kk));
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias_.value.data(),
                                                          static_cast<Eigen::Index>(spec_.out));
  for (std::size_t n = 0; n < in.n; ++n) {
    const T* src = x.sample(n);
    if (!direct) {
      im2col(src, in, spec_, os.h, os.w, col.data());
      src = col.data();
    }
    ConstMapMat<T> cmat(src, static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(hw));
    MapMat<T> out(y.sample(n), static_cast<Eigen::Index>(spec_.out), static_cast<Eigen::Index>(hw));
    out.noalias() = wmat * cmat;
    out.colwise() += b;
  }
  if (caches(mode)) input_ = x;
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& grad_out) {
  const Shape in = input_.shape();
  const Shape os = out_shape(in);
  if (grad_out.shape() != os) throw ShapeError("conv backward: got " + grad_out.shape().str());
  const std::size_t kk = spec_.in * spec_.kernel * spec_.kernel;
  const std::size_t hw = os.h * os.w;
  const bool direct = spec_.kernel == 1 && spec_.stride == 1 && spec_.pad == 0;
  Tensor<T> dx(in);
  AlignedVector<T> col(direct ? 0 : kk * hw);
  AlignedVector<T> dcol(direct ? 0 : kk * hw);
  ConstMapMat<T> wmat(weight_.value.data(), static_cast<Eigen::Index>(spec_.out),
                      static_cast<Eigen::Index>(kk));
  MapMat<T> dw(weight_.grad.data(), static_cast<Eigen::Index>(spec_.out),
               static_cast<Eigen::Index>(kk));
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(bias_.grad.data(),
                                                     static_cast<Eigen::Index>(spec_.out));
  for (std::size_t n = 0; n < in.n; ++n) {
    const T* src = input_.sample(n);
    if (!direct) {
      im2col(src, in, spec_, os.h, os.w, col.data());
      src = col.data();
    }
    ConstMapMat<T> cmat(src, static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(hw));
    ConstMapMat<T> g(grad_out.sample(n), static_cast<Eigen::Index>(spec_.out),
                     static_cast<Eigen::Index>(hw));
    dw.noalias() += g * cmat.transpose();
    db += g.rowwise().sum();
    if (direct) {
      MapMat<T> dxm(dx.sample(n), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(hw));
      dxm.noalias() = wmat.transpose() * g;
    } else {
      MapMat<T> dc(dcol.data(), static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(hw));
      dc.noalias() = wmat.transpose() * g;
      col2im(dcol.data(), in, spec_, os.h, os.w, dx.sample(n));
    }
  }
  return dx;
}

template <typename T>
void Conv2d<T>::collect_parameters(std::vector<Parameter<T>*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

// ---------------------------------------------------------------------------
// Activations

template <typename T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x, Mode mode) {
  Tensor<T> y(x.shape());
  auto in = x.values();
  auto out = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T(0) ? in[i] : slope_ * in[i];
  if (caches(mode)) input_ = x;
  return y;
}

template <typename T>
Tensor<T> Relu<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(grad_out.shape());
  auto in = input_.values();
  auto g = grad_out.values();
  auto out = dx.values();
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = in[i] > T(0) ? g[i] : slope_ * g[i];
  return dx;
}

template <typename T>
T BoundedSigmoid<T>::limit() {
  // Largest |x| whose logistic value is still distinguishable from 0 and 1.
  return std::is_same_v<T, float> ? T(15) : T(30);
}

template <typename T>
T BoundedSigmoid<T>::apply(T x) {
  const T c = std::clamp(x, -limit(), limit());
  return T(1) / (T(1) + std::exp(-c));
}

template <typename T>
Tensor<T> BoundedSigmoid<T>::forward(const Tensor<T>& x, Mode mode) {
  Tensor<T> y(x.shape());
  auto in = x.values();
  auto out = y.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = apply(in[i]);
  if (caches(mode)) {
    input_ = x;
    output_ = y;
  }
  return y;
}

template <typename T>
Tensor<T> BoundedSigmoid<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(grad_out.shape());
  auto in = input_.values();
  auto y = output_.values();
  auto g = grad_out.values();
  auto out = dx.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool clamped = in[i] < -limit() || in[i] > limit();
    out[i] = clamped ? T(0) : g[i] * y[i] * (T(1) - y[i]);
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Pooling / resampling

template <typename T>
Tensor<T> MaxPool2<T>::forward(const Tensor<T>& x, Mode mode) {
  const Shape s = x.shape();
  if (s.h < 2 || s.w < 2) throw ShapeError("maxpool input too small: " + s.str());
  const Shape os{s.n, s.c, s.h / 2, s.w / 2};
  Tensor<T> y(os);
  std::vector<std::size_t> arg(caches(mode) ? os.size() : 0);
  std::size_t o = 0;
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const std::size_t base = p * s.h * s.w;
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      for (std::size_t ox = 0; ox < os.w; ++ox, ++o) {
        std::size_t best = base + (2 * oy) * s.w + 2 * ox;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = base + (2 * oy + dy) * s.w + 2 * ox + dx;
            if (x.values()[idx] > x.values()[best]) best = idx;
          }
        }
        y.values()[o] = x.values()[best];
        if (!arg.empty()) arg[o] = best;
      }
    }
  }
  if (caches(mode)) {
    in_shape_ = s;
    argmax_ = std::move(arg);
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool2<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(in_shape_);
  auto g = grad_out.values();
  for (std::size_t i = 0; i < g.size(); ++i) dx.values()[argmax_[i]] += g[i];
  return dx;
}

template <typename T>
Tensor<T> Upsample2<T>::forward(const Tensor<T>& x, Mode mode) {
  const Shape s = x.shape();
  const Shape os{s.n, s.c, s.h * 2, s.w * 2};
  Tensor<T> y(os);
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const T* src = x.data() + p * s.h * s.w;
    T* dst = y.data() + p * os.h * os.w;
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      const T* srow = src + (oy / 2) * s.w;
      T* drow = dst + oy * os.w;
      for (std::size_t ox = 0; ox < os.w; ++ox) drow[ox] = srow[ox / 2];
    }
  }
  if (caches(mode)) in_shape_ = s;
  return y;
}

template <typename T>
Tensor<T> Upsample2<T>::backward(const Tensor<T>& grad_out) {
  const Shape s = in_shape_;
  const Shape os = grad_out.shape();
  Tensor<T> dx(s);
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    const T* src = grad_out.data() + p * os.h * os.w;
    T* dst = dx.data() + p * s.h * s.w;
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      for (std::size_t ox = 0; ox < os.w; ++ox) dst[(oy / 2) * s.w + ox / 2] += src[oy * os.w + ox];
    }
  }
  return dx;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::forward(const Tensor<T>& x, Mode mode) {
  const Shape s = x.shape();
  Tensor<T> y(Shape{s.n, s.c, 1, 1});
  const std::size_t hw = s.plane();
  for (std::size_t p = 0; p < s.n * s.c; ++p) {
    T acc = 0;
    for (std::size_t i = 0; i < hw; ++i) acc += x.data()[p * hw + i];
    y.data()[p] = acc / static_cast<T>(hw);
  }
  if (caches(mode)) in_shape_ = s;
  return y;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(in_shape_);
  const std::size_t hw = in_shape_.plane();
  for (std::size_t p = 0; p < in_shape_.n * in_shape_.c; ++p) {
    const T g = grad_out.data()[p] / static_cast<T>(hw);
    for (std::size_t i = 0; i < hw; ++i) dx.data()[p * hw + i] = g;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::size_t channels, std::string name, T momentum, T eps)
    : channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_(name + ".gamma", Shape{channels, 1, 1, 1}),
      beta_(name + ".beta", Shape{channels, 1, 1, 1}),
      running_mean_(Shape{channels, 1, 1, 1}, T(0)),
      running_var_(Shape{channels, 1, 1, 1}, T(1)) {
  gamma_.value.fill(T(1));
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, Mode mode) {
  const Shape s = x.shape();
  if (s.c != channels_) throw ShapeError("batchnorm channel mismatch: " + s.str());
  const std::size_t hw = s.plane();
  const std::size_t m = s.n * hw;
  Tensor<T> y(s);
  if (mode == Mode::kInference) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const T inv = T(1) / std::sqrt(running_var_.data()[c] + eps_);
      const T g = gamma_.value.data()[c] * inv;
      const T b = beta_.value.data()[c] - g * running_mean_.data()[c];
      for (std::size_t n = 0; n < s.n; ++n) {
        const T* src = x.sample(n) + c * hw;
        T* dst = y.sample(n) + c * hw;
        for (std::size_t i = 0; i < hw; ++i) dst[i] = g * src[i] + b;
      }
    }
    return y;
  }
  xhat_ = Tensor<T>(s);
  inv_std_.assign(s.c, T(0));
  for (std::size_t c = 0; c < s.c; ++c) {
    // Two-pass mean/variance in double for stability.
    double mean = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* src = x.sample(n) + c * hw;
      for (std::size_t i = 0; i < hw; ++i) mean += src[i];
    }
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* src = x.sample(n) + c * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        const double d = src[i] - mean;
        var += d * d;
      }
    }
    var /= static_cast<double>(m);
    const T inv = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps_)));
    inv_std_[c] = inv;
    const T g = gamma_.value.data()[c];
    const T b = beta_.value.data()[c];
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* src = x.sample(n) + c * hw;
      T* xh = xhat_.sample(n) + c * hw;
      T* dst = y.sample(n) + c * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        xh[i] = static_cast<T>((src[i] - mean)) * inv;
        dst[i] = g * xh[i] + b;
      }
    }
    if (mode == Mode::kTrain) {
      const double unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1) : var;
      running_mean_.data()[c] = (T(1) - momentum_) * running_mean_.data()[c] + momentum_ * static_cast<T>(mean);
      running_var_.data()[c] = (T(1) - momentum_) * running_var_.data()[c] + momentum_ * static_cast<T>(unbiased);
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& grad_out) {
  const Shape s = xhat_.shape();
  const std::size_t hw = s.plane();
  const double m = static_cast<double>(s.n * hw);
  Tensor<T> dx(s);
  for (std::size_t c = 0; c < s.c; ++c) {
    double sum_g = 0.0;
    double sum_gx = 0.0;
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* g = grad_out.sample(n) + c * hw;
      const T* xh = xhat_.sample(n) + c * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        sum_g += g[i];
        sum_gx += static_cast<double>(g[i]) * xh[i];
      }
    }
    gamma_.grad.data()[c] += static_cast<T>(sum_gx);
    beta_.grad.data()[c] += static_cast<T>(sum_g);
    const double scale = static_cast<double>(gamma_.value.data()[c]) * inv_std_[c] / m;
    for (std::size_t n = 0; n < s.n; ++n) {
      const T* g = grad_out.sample(n) + c * hw;
      const T* xh = xhat_.sample(n) + c * hw;
      T* d = dx.sample(n) + c * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        d[i] = static_cast<T>(scale * (m * g[i] - sum_g - xh[i] * sum_gx));
      }
    }
  }
  return dx;
}

template <typename T>
void BatchNorm2d<T>::collect_parameters(std::vector<Parameter<T>*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

template <typename T>
void BatchNorm2d<T>::collect_buffers(std::vector<Tensor<T>*>& out) {
  out.push_back(&running_mean_);
  out.push_back(&running_var_);
}

// ---------------------------------------------------------------------------
// Linear

template <typename T>
Linear<T>::Linear(std::size_t in, std::size_t out, std::string name)
    : in_(in),
      out_(out),
      weight_(name + ".weight", Shape{out, in, 1, 1}),
      bias_(name + ".bias", Shape{out, 1, 1, 1}) {}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x, Mode mode) {
  const Shape s = x.shape();
  if (s.per_sample() != in_) {
    throw ShapeError("linear expects " + std::to_string(in_) + " inputs per sample, got " + s.str());
  }
  Tensor<T> y(Shape{s.n, out_, 1, 1});
  ConstMapMat<T> xm(x.data(), static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(in_));
  ConstMapMat<T> wm(weight_.value.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
  MapMat<T> ym(y.data(), static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(out_));
  ym.noalias() = xm * wm.transpose();
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias_.value.data(), static_cast<Eigen::Index>(out_));
  ym.rowwise() += b;
  if (caches(mode)) input_ = x;
  return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& grad_out) {
  const Shape s = input_.shape();
  Tensor<T> dx(s);
  ConstMapMat<T> xm(input_.data(), static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(in_));
  ConstMapMat<T> wm(weight_.value.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
  ConstMapMat<T> g(grad_out.data(), static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(out_));
  MapMat<T> dw(weight_.grad.data(), static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
  dw.noalias() += g.transpose() * xm;
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> db(bias_.grad.data(), static_cast<Eigen::Index>(out_));
  db += g.colwise().sum();
  MapMat<T> dxm(dx.data(), static_cast<Eigen::Index>(s.n), static_cast<Eigen::Index>(in_));
  dxm.noalias() = g * wm;
  return dx;
}

template <typename T>
void Linear<T>::collect_parameters(std::vector<Parameter<T>*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

// ---------------------------------------------------------------------------
// Containers

template <typename T>
Sequential<T>& Sequential<T>::add(LayerPtr<T> layer, std::string tag) {
  layers_.push_back(std::move(layer));
  tags_.push_back(std::move(tag));
  return *this;
}

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x, Mode mode) {
  Tensor<T> h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i]->forward(h, mode);
    if (trace_ && !tags_[i].empty()) trace_(tags_[i], h.shape());
  }
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
void Sequential<T>::collect_parameters(std::vector<Parameter<T>*>& out) {
  for (auto& l : layers_) l->collect_parameters(out);
}

template <typename T>
void Sequential<T>::collect_buffers(std::vector<Tensor<T>*>& out) {
  for (auto& l : layers_) l->collect_buffers(out);
}

template <typename T>
void Sequential<T>::set_trace(TraceHook hook) {
  trace_ = std::move(hook);
}

template <typename T>
Tensor<T> Residual<T>::forward(const Tensor<T>& x, Mode mode) {
  Tensor<T> y = body_.forward(x, mode);
  if (y.shape() != x.shape()) throw ShapeError("residual body changed shape to " + y.shape().str());
  add_inplace(y, x);
  return y;
}

template <typename T>
Tensor<T> Residual<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx = body_.backward(grad_out);
  add_inplace(dx, grad_out);
  return dx;
}

template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError("add: " + a.shape().str() + " vs " + b.shape().str());
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += bv[i];
}

template <typename T>
void init_parameters(const std::vector<Parameter<T>*>& params, std::mt19937_64& rng) {
  for (auto* p : params) {
    if (ends_with(p->name, ".weight")) {
      const double fan_in = static_cast<double>(p->value.shape().per_sample());
      std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
      for (auto& v : p->value.values()) v = static_cast<T>(dist(rng));
    } else if (ends_with(p->name, ".gamma")) {
      p->value.fill(T(1));
    } else {
      p->value.fill(T(0));
    }
    p->grad.fill(T(0));
  }
}

#define IVUSIM_INSTANTIATE_LAYERS(T)                                           \
  template class Conv2d<T>;                                                    \
  template class Relu<T>;                                                      \
  template class BoundedSigmoid<T>;                                            \
  template class MaxPool2<T>;                                                  \
  template class Upsample2<T>;                                                 \
  template class BatchNorm2d<T>;                                               \
  template class GlobalAvgPool<T>;                                             \
  template class Linear<T>;                                                    \
  template class Sequential<T>;                                                \
  template class Residual<T>;                                                  \
  template void add_inplace<T>(Tensor<T>&, const Tensor<T>&);                  \
  template void init_parameters<T>(const std::vector<Parameter<T>*>&, std::mt19937_64&);

IVUSIM_INSTANTIATE_LAYERS(float)
IVUSIM_INSTANTIATE_LAYERS(double)

}  // namespace ivusim::nn
