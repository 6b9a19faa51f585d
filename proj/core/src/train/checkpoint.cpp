#include "ivusim/train/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "ivusim/util/hash.hpp"

namespace fs = std::filesystem;

namespace ivusim::train {
namespace {

constexpr std::array<char, 8> kMagic{'I', 'V', 'S', 'G', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void u64(std::uint64_t v) { os_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void tensor(const NamedTensor& t) {
    str(t.name);
    const auto& s = t.value.shape();
    u64(s.n);
    u64(s.c);
    u64(s.h);
    u64(s.w);
    os_.write(reinterpret_cast<const char*>(t.value.data()),
              static_cast<std::streamsize>(t.value.size() * sizeof(float)));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string origin) : is_(is), origin_(std::move(origin)) {}
  std::uint64_t u64() {
    std::uint64_t v = 0;
    read(&v, sizeof v);
    return v;
  }
  std::string str() {
    const auto n = u64();
    if (n > (1ull << 32)) fail("string too long");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  NamedTensor tensor() {
    NamedTensor t;
    t.name = str();
    nn::Shape s{u64(), u64(), u64(), u64()};
    if (s.size() > (1ull << 34)) fail("tensor too large");
    t.value = nn::Tensor<float>(s);
    read(t.value.data(), t.value.size() * sizeof(float));
    return t;
  }
  void read(void* dst, std::size_t n) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) fail("truncated");
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw Error("checkpoint " + origin_ + ": " + why);
  }

 private:
  std::istream& is_;
  std::string origin_;
};

}  // namespace

const std::vector<NamedTensor>& Checkpoint::section(const std::string& key) const {
  auto it = sections.find(key);
  if (it == sections.end()) throw Error("checkpoint has no section '" + key + "'");
  return it->second;
}

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os.write(kMagic.data(), kMagic.size());
    const std::uint32_t version = kVersion;
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    Writer w(os);
    w.str(ckpt.stage);
    w.u64(ckpt.seed);
    w.u64(ckpt.step);
    w.u64(ckpt.epoch);
    w.str(ckpt.rng_state);
    w.str(ckpt.config);
    w.u64(ckpt.text.size());
    for (const auto& [k, v] : ckpt.text) {
      w.str(k);
      w.str(v);
    }
    w.u64(ckpt.sections.size());
    for (const auto& [k, tensors] : ckpt.sections) {
      w.str(k);
      w.u64(tensors.size());
      for (const auto& t : tensors) w.tensor(t);
    }
    os.flush();
    if (!os) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint " + path.string());
  Reader r(is, path.string());
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kMagic) r.fail("not an ivusim checkpoint");
  std::uint32_t version = 0;
  r.read(&version, sizeof version);
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  Checkpoint c;
  c.stage = r.str();
  c.seed = r.u64();
  c.step = r.u64();
  c.epoch = r.u64();
  c.rng_state = r.str();
  c.config = r.str();
  for (auto n = r.u64(); n > 0; --n) {
    auto k = r.str();
    c.text[k] = r.str();
  }
  for (auto n = r.u64(); n > 0; --n) {
    auto k = r.str();
    auto& sec = c.sections[k];
    for (auto m = r.u64(); m > 0; --m) sec.push_back(r.tensor());
  }
  return c;
}

std::vector<NamedTensor> snapshot(nn::Network<float>& net) {
  std::vector<NamedTensor> out;
  for (auto* p : net.parameters()) out.push_back({p->name, p->value});
  std::size_t i = 0;
  for (auto* b : net.buffers()) out.push_back({"buffer" + std::to_string(i++), *b});
  return out;
}

void restore(nn::Network<float>& net, const std::vector<NamedTensor>& tensors) {
  auto params = net.parameters();
  auto bufs = net.buffers();
  if (tensors.size() != params.size() + bufs.size()) {
    throw ShapeError("restore: checkpoint has " + std::to_string(tensors.size()) +
                     " tensors, network expects " + std::to_string(params.size() + bufs.size()));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    nn::Tensor<float>* dst = nullptr;
    std::string expect;
    if (i < params.size()) {
      dst = &params[i]->value;
      expect = params[i]->name;
    } else {
      dst = bufs[i - params.size()];
      expect = "buffer" + std::to_string(i - params.size());
    }
    if (t.name != expect || t.value.shape() != dst->shape()) {
      throw ShapeError("restore: '" + t.name + "' " + t.value.shape().str() + " does not match '" +
                       expect + "' " + dst->shape().str());
    }
    *dst = t.value;
  }
}

std::vector<NamedTensor> snapshot(Adam<float>& opt) {
  std::vector<NamedTensor> out;
  // The step count rides in the name; a float could not hold it exactly.
  out.push_back({"t=" + std::to_string(opt.steps()), nn::Tensor<float>(nn::Shape{1, 1, 1, 1})});
  for (std::size_t i = 0; i < opt.first_moments().size(); ++i) {
    out.push_back({"m" + std::to_string(i), opt.first_moments()[i]});
    out.push_back({"v" + std::to_string(i), opt.second_moments()[i]});
  }
  return out;
}

void restore(Adam<float>& opt, const std::vector<NamedTensor>& tensors) {
  auto& m = opt.first_moments();
  auto& v = opt.second_moments();
  if (tensors.size() != 1 + 2 * m.size() || !tensors[0].name.starts_with("t=")) {
    throw ShapeError("restore: optimizer state does not match");
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& tm = tensors[1 + 2 * i].value;
    const auto& tv = tensors[2 + 2 * i].value;
    if (tm.shape() != m[i].shape() || tv.shape() != v[i].shape()) {
      throw ShapeError("restore: optimizer moment shape mismatch at " + std::to_string(i));
    }
    m[i] = tm;
    v[i] = tv;
  }
  opt.set_steps(std::stoull(tensors[0].name.substr(2)));
}

std::string parameter_hash(nn::Network<float>& net) {
  Sha256 h;
  for (const auto& t : snapshot(net)) {
    h.update(t.name);
    h.update(t.value.shape().str());
    h.update_values<float>(t.value.values());
  }
  return h.finish();
}

}  // namespace ivusim::train
