#include "meshcast/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "meshcast/error.hpp"

namespace meshcast {

namespace {

constexpr char kMeshMagic[8] = {'M', 'C', 'M', 'E', 'S', 'H', 0, 0};
constexpr char kTrajMagic[8] = {'M', 'C', 'T', 'R', 'A', 'J', 0, 0};
constexpr char kCkptMagic[8] = {'M', 'C', 'C', 'K', 'P', 'T', 0, 0};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot open " + path + " for writing");
  }

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void f64_array(const double* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(data, n * sizeof(double));
    } else {
      for (std::size_t i = 0; i < n; ++i) f64(data[i]);
    }
  }
  void close() {
    out_.flush();
    if (!out_) throw DataError("write failed for " + path_);
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DataError("cannot open " + path);
  }

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw DataError("unexpected end of file in " + path_);
    }
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw DataError("implausible string length in " + path_);
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void f64_array(double* data, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(data, n * sizeof(double));
    } else {
      for (std::size_t i = 0; i < n; ++i) data[i] = f64();
    }
  }
  void expect_magic(const char (&magic)[8], const char* kind) {
    char buf[8];
    bytes(buf, 8);
    if (std::memcmp(buf, magic, 8) != 0) {
      throw DataError(path_ + " is not a " + kind + " file");
    }
    const std::uint32_t version = u32();
    if (version != kFormatVersion) {
      throw DataError(path_ + ": unsupported " + std::string(kind) + " format version " +
                      std::to_string(version));
    }
    u32();  // reserved
  }

 private:
  std::string path_;
  std::ifstream in_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t length) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < length; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t file_fnv1a64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

void write_mesh(const std::string& path, const MeshGraph& mesh) {
  Writer w(path);
  w.bytes(kMeshMagic, 8);
  w.u32(kFormatVersion);
  w.u32(0);
  w.u64(static_cast<std::uint64_t>(mesh.node_count));
  w.u64(static_cast<std::uint64_t>(mesh.edges.size()));
  for (const auto& [a, b] : mesh.edges) {
    w.u32(static_cast<std::uint32_t>(a));
    w.u32(static_cast<std::uint32_t>(b));
  }
  for (const auto& p : mesh.node_positions) {
    w.f64(p[0]);
    w.f64(p[1]);
  }
  w.close();
}

MeshGraph read_mesh(const std::string& path) {
  Reader r(path);
  r.expect_magic(kMeshMagic, "mesh");
  const auto node_count = static_cast<int>(r.u64());
  const auto edge_count = r.u64();
  std::vector<std::pair<int, int>> edges(edge_count);
  for (auto& [a, b] : edges) {
    a = static_cast<int>(r.u32());
    b = static_cast<int>(r.u32());
  }
  std::vector<std::array<double, 2>> positions(node_count);
  for (auto& p : positions) {
    p[0] = r.f64();
    p[1] = r.f64();
  }
  try {
    return build_mesh_graph(node_count, edges, positions);
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  Writer w(path);
  w.bytes(kTrajMagic, 8);
  w.u32(kFormatVersion);
  w.u32(0);
  w.str(traj.scenario_id);
  w.f64(traj.melt_rate);
  w.u64(static_cast<std::uint64_t>(traj.T));
  w.u64(static_cast<std::uint64_t>(traj.N));
  w.u64(static_cast<std::uint64_t>(traj.C));
  for (int c = 0; c < kStateChannels; ++c) w.str(kStateChannelNames[c]);
  w.u64(kStaticChannels);
  for (int c = 0; c < kStaticChannels; ++c) w.str(kStaticChannelNames[c]);
  w.u64(traj.mesh_hash);
  w.f64_array(traj.static_features.data.data(), traj.static_features.data.size());
  w.f64_array(traj.states.data(), traj.states.size());
  w.close();
}

Trajectory read_trajectory(const std::string& path) {
  Reader r(path);
  r.expect_magic(kTrajMagic, "trajectory");
  Trajectory traj;
  traj.scenario_id = r.str();
  traj.melt_rate = r.f64();
  traj.T = static_cast<int>(r.u64());
  traj.N = static_cast<int>(r.u64());
  traj.C = static_cast<int>(r.u64());
  if (traj.T < 1 || traj.N < 1 || traj.C != kStateChannels) {
    throw DataError(path + ": bad trajectory dimensions");
  }
  for (int c = 0; c < kStateChannels; ++c) {
    if (r.str() != kStateChannelNames[c]) {
      throw DataError(path + ": unexpected state channel order");
    }
  }
  const auto statics = r.u64();
  if (statics != kStaticChannels) throw DataError(path + ": unexpected static channel count");
  for (int c = 0; c < kStaticChannels; ++c) {
    if (r.str() != kStaticChannelNames[c]) {
      throw DataError(path + ": unexpected static channel order");
    }
  }
  traj.mesh_hash = r.u64();
  traj.static_features = DenseMatrix(traj.N, kStaticChannels);
  r.f64_array(traj.static_features.data.data(), traj.static_features.data.size());
  traj.states.resize(static_cast<std::size_t>(traj.T) * traj.N * traj.C);
  r.f64_array(traj.states.data(), traj.states.size());
  validate_trajectory(traj);
  return traj;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  validate_params(ckpt.params, ckpt.model);
  Writer w(path);
  w.bytes(kCkptMagic, 8);
  w.u32(kFormatVersion);
  w.u32(0);
  w.u32(kGcnLayers);
  w.u32(static_cast<std::uint32_t>(ckpt.model.input_width));
  w.u32(static_cast<std::uint32_t>(ckpt.model.hidden));
  w.u32(static_cast<std::uint32_t>(ckpt.model.act));
  w.u32(ckpt.model.magnitude_only_inputs ? 1 : 0);
  w.u32(0);
  w.u64(ckpt.seed);
  w.u32(static_cast<std::uint32_t>(ckpt.horizons.size()));
  for (int h : ckpt.horizons) w.u32(static_cast<std::uint32_t>(h));
  w.u64(ckpt.stats_hash);
  for (const DenseMatrix* m : param_list(ckpt.params)) {
    w.u32(static_cast<std::uint32_t>(m->rows));
    w.u32(static_cast<std::uint32_t>(m->cols));
    w.f64_array(m->data.data(), m->data.size());
  }
  w.close();
}

Checkpoint read_checkpoint(const std::string& path) {
  Reader r(path);
  r.expect_magic(kCkptMagic, "checkpoint");
  Checkpoint ckpt;
  const std::uint32_t layers = r.u32();
  if (layers != kGcnLayers) throw DataError(path + ": unexpected layer count");
  ckpt.model.input_width = static_cast<int>(r.u32());
  ckpt.model.hidden = static_cast<int>(r.u32());
  const std::uint32_t act = r.u32();
  if (act > 2) throw DataError(path + ": unknown activation code");
  ckpt.model.act = static_cast<Activation>(act);
  ckpt.model.magnitude_only_inputs = r.u32() != 0;
  r.u32();  // reserved
  ckpt.seed = r.u64();
  const std::uint32_t horizon_count = r.u32();
  if (horizon_count == 0 || horizon_count > 4096) {
    throw DataError(path + ": implausible horizon count");
  }
  for (std::uint32_t i = 0; i < horizon_count; ++i) {
    ckpt.horizons.push_back(static_cast<int>(r.u32()));
  }
  ckpt.stats_hash = r.u64();
  for (DenseMatrix* m : param_list(ckpt.params)) {
    const int rows = static_cast<int>(r.u32());
    const int cols = static_cast<int>(r.u32());
    if (rows < 1 || cols < 1 || static_cast<std::int64_t>(rows) * cols > (1 << 28)) {
      throw DataError(path + ": implausible matrix shape");
    }
    *m = DenseMatrix(rows, cols);
    r.f64_array(m->data.data(), m->data.size());
  }
  try {
    validate_params(ckpt.params, ckpt.model);
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
  return ckpt;
}

void write_norm_stats(const std::string& path, const NormStats& stats) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "# normalization stats v1\n";
  out << "# group name mean std constant\n";
  for (const auto& ch : stats.prognostic) {
    out << "prognostic " << ch.name << ' ' << format_double(ch.mean) << ' '
        << format_double(ch.std) << ' ' << (ch.constant ? 1 : 0) << '\n';
  }
  for (const auto& ch : stats.context) {
    out << "context " << ch.name << ' ' << format_double(ch.mean) << ' ' << format_double(ch.std)
        << ' ' << (ch.constant ? 1 : 0) << '\n';
  }
  out.flush();
  if (!out) throw DataError("write failed for " + path);
}

NormStats read_norm_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  NormStats stats;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string group;
    NormStats::Channel ch;
    int constant = 0;
    if (!(ss >> group >> ch.name >> ch.mean >> ch.std >> constant)) {
      throw DataError(path + ": malformed stats line: " + line);
    }
    ch.constant = constant != 0;
    if (group == "prognostic") {
      stats.prognostic.push_back(ch);
    } else if (group == "context") {
      stats.context.push_back(ch);
    } else {
      throw DataError(path + ": unknown stats group " + group);
    }
  }
  if (stats.prognostic.size() != kPrognosticChannels ||
      stats.context.size() != kContextChannels) {
    throw DataError(path + ": wrong channel count");
  }
  return stats;
}

}  // namespace meshcast
