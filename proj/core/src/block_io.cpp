#include "blindmimo/block_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "block container assumes a little-endian host");

namespace blindmimo {

namespace {

constexpr char kMagic[16] = {'B', 'L', 'I', 'N', 'D', 'M', 'I', 'M',
                             'O', '.', 'B', 'L', 'K', '.', '1', '\0'};
constexpr std::uint32_t kKindRxBlock = 1;
constexpr std::uint32_t kKindEstimate = 2;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("block_io: cannot open '" + path + "' for writing");
  }
  void u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void raw(const char* data, size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
  void matrix_rowmajor(const MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        f64(m(i, j).real());
        f64(m(i, j).imag());
      }
  }
  void check() {
    if (!out_) throw std::runtime_error("block_io: write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("block_io: cannot open '" + path + "'");
  }
  std::uint32_t u32() {
    std::uint32_t v;
    read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }
  double f64() {
    double v;
    read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }
  void raw(char* data, size_t n) { read(data, n); }
  MatrixXcd matrix_rowmajor(int rows, int cols) {
    MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const double re = f64();
        const double im = f64();
        m(i, j) = cxd(re, im);
      }
    return m;
  }

 private:
  void read(char* data, size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n)
      throw std::runtime_error("block_io: truncated container");
  }
  std::ifstream in_;
};

std::uint32_t read_header(Reader& r, std::uint32_t expected_kind) {
  char magic[16];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("block_io: bad magic (not a blindmimo container)");
  const std::uint32_t kind = r.u32();
  if (kind != expected_kind) throw std::runtime_error("block_io: unexpected record kind");
  return kind;
}

void sanity_dim(long v, const char* what) {
  if (v < 1 || v > (1L << 24)) throw std::runtime_error(std::string("block_io: implausible ") + what);
}

}  // namespace

void write_rxblock(const std::string& path, const RxBlock& block) {
  Writer w(path);
  w.raw(kMagic, sizeof kMagic);
  w.u32(kKindRxBlock);
  std::uint32_t flags = 0;
  if (block.y_freq.size() > 0) flags |= 1u;
  if (block.r_time && block.r_freq) flags |= 2u;
  w.u32(flags);
  w.u32(static_cast<std::uint32_t>(block.dims.N));
  w.u32(static_cast<std::uint32_t>(block.dims.K));
  w.u32(static_cast<std::uint32_t>(block.dims.T));
  w.u32(static_cast<std::uint32_t>(block.dims.T_D));
  w.f64(block.rho);
  if (flags & 1u) w.matrix_rowmajor(block.y_freq.transpose());  // per bin m, antennas in order
  if (flags & 2u) {
    w.matrix_rowmajor(block.r_time->transpose());
    w.matrix_rowmajor(block.r_freq->transpose());
  }
  w.check();
}

RxBlock read_rxblock(const std::string& path) {
  Reader r(path);
  read_header(r, kKindRxBlock);
  const std::uint32_t flags = r.u32();
  RxBlock block;
  block.dims.N = static_cast<int>(r.u32());
  block.dims.K = static_cast<int>(r.u32());
  block.dims.T = static_cast<int>(r.u32());
  block.dims.T_D = static_cast<int>(r.u32());
  sanity_dim(block.dims.N, "N");
  sanity_dim(block.dims.K, "K");
  sanity_dim(block.dims.T, "T");
  if (block.dims.T_D < 0) throw std::runtime_error("block_io: implausible T_D");
  block.rho = r.f64();
  if (flags & 1u) block.y_freq = r.matrix_rowmajor(block.dims.T, block.dims.N).transpose();
  if (flags & 2u) {
    block.r_time = r.matrix_rowmajor(block.dims.T, block.dims.N).transpose();
    block.r_freq = r.matrix_rowmajor(block.dims.T, block.dims.N).transpose();
  }
  return block;
}

void write_estimate(const std::string& path, const EstimateBundle& est) {
  Writer w(path);
  w.raw(kMagic, sizeof kMagic);
  w.u32(kKindEstimate);
  const int T = static_cast<int>(est.H_hat.size());
  const int N = T > 0 ? static_cast<int>(est.H_hat[0].rows()) : 0;
  w.u32(static_cast<std::uint32_t>(est.S_hat.rows()));
  w.u32(static_cast<std::uint32_t>(est.S_hat.cols()));
  w.u32(static_cast<std::uint32_t>(T));
  w.u32(static_cast<std::uint32_t>(N));
  w.matrix_rowmajor(est.S_hat);
  for (const MatrixXcd& h : est.H_hat) w.matrix_rowmajor(h);
  w.check();
}

EstimateBundle read_estimate(const std::string& path) {
  Reader r(path);
  read_header(r, kKindEstimate);
  const int P = static_cast<int>(r.u32());
  const int K = static_cast<int>(r.u32());
  const int T = static_cast<int>(r.u32());
  const int N = static_cast<int>(r.u32());
  sanity_dim(P, "P");
  sanity_dim(K, "K");
  sanity_dim(T, "T");
  sanity_dim(N, "N");
  EstimateBundle est;
  est.S_hat = r.matrix_rowmajor(P, K);
  est.H_hat.reserve(T);
  for (int m = 0; m < T; ++m) est.H_hat.push_back(r.matrix_rowmajor(N, K));
  return est;
}

}  // namespace blindmimo
