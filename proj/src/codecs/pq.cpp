#include "hashbench/pq.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "hashbench/kernels.hpp"
#include "hashbench/kmeans.hpp"
#include "hashbench/random.hpp"

namespace hashbench {

namespace {

constexpr std::size_t kMaxKs = 65536;

}  // namespace

std::size_t PqCodebook::code_size_bits() const noexcept {
  const std::size_t per = ks_ < 2 ? 0 : static_cast<std::size_t>(std::bit_width(ks_ - 1));
  return m_ * per;
}

std::vector<float> PqCodebook::padded(std::span<const float> x) const {
  if (x.size() != input_dim_) {
    throw ShapeError("pq: vector has dimension " + std::to_string(x.size()) + ", codebook " +
                     std::to_string(input_dim_));
  }
  std::vector<float> out(padded_dim(), 0.0f);
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

void PqCodebook::check_code(std::span<const std::uint16_t> code) const {
  if (code.size() != m_) {
    throw ShapeError("pq code has " + std::to_string(code.size()) + " entries, expected " +
                     std::to_string(m_));
  }
  for (auto c : code) {
    if (c >= ks_) throw CorruptionError("pq code index " + std::to_string(c) + " >= ks");
  }
}

PqCode PqCodebook::encode(std::span<const float> x) const {
  const auto v = padded(x);
  PqCode code;
  code.indices.resize(m_);
  std::uint32_t best = 0;
  double dist = 0.0;
  for (std::size_t j = 0; j < m_; ++j) {
    kernels::serial::assign_nearest(v.data() + j * dsub_, 1, dsub_,
                                    centroids_.data() + j * ks_ * dsub_, ks_, {&best, 1},
                                    {&dist, 1});
    code.indices[j] = static_cast<std::uint16_t>(best);
  }
  return code;
}

PqCodeMatrix PqCodebook::encode_rows(const FeatureMatrix& x) const {
  if (x.cols() != input_dim_) throw ShapeError("pq encode_rows: dimension mismatch");
  PqCodeMatrix out;
  out.count = x.rows();
  out.m = m_;
  out.data.resize(out.count * m_);
  std::vector<float> sub(x.rows() * dsub_);
  std::vector<std::uint32_t> assign(x.rows());
  std::vector<double> dist(x.rows());
  for (std::size_t j = 0; j < m_; ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto row = x.row(i);
      for (std::size_t t = 0; t < dsub_; ++t) {
        const std::size_t col = j * dsub_ + t;
        sub[i * dsub_ + t] = col < input_dim_ ? row[col] : 0.0f;
      }
    }
    kernels::assign_nearest(sub.data(), x.rows(), dsub_, centroids_.data() + j * ks_ * dsub_,
                            ks_, assign, dist);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out.data[i * m_ + j] = static_cast<std::uint16_t>(assign[i]);
    }
  }
  return out;
}

std::vector<float> PqCodebook::decode(const PqCode& code) const {
  check_code(code.indices);
  std::vector<float> out(padded_dim());
  for (std::size_t j = 0; j < m_; ++j) {
    const auto c = centroid(j, code.indices[j]);
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(j * dsub_));
  }
  out.resize(input_dim_);
  return out;
}

FeatureMatrix PqCodebook::decode_rows(const PqCodeMatrix& codes) const {
  if (codes.m != m_) throw ShapeError("pq decode_rows: code length mismatch");
  FeatureMatrix out(codes.count, input_dim_);
  for (std::size_t i = 0; i < codes.count; ++i) {
    const auto code = codes.row(i);
    check_code(code);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < m_; ++j) {
      const auto c = centroid(j, code[j]);
      for (std::size_t t = 0; t < dsub_; ++t) {
        const std::size_t col = j * dsub_ + t;
        if (col < input_dim_) dst[col] = c[t];
      }
    }
  }
  return out;
}

std::vector<double> PqCodebook::distance_table(std::span<const float> query) const {
  const auto v = padded(query);
  std::vector<double> table(m_ * ks_);
  for (std::size_t j = 0; j < m_; ++j) {
    for (std::size_t c = 0; c < ks_; ++c) {
      table[j * ks_ + c] = kernels::squared_l2(v.data() + j * dsub_, centroid(j, c).data(), dsub_);
    }
  }
  return table;
}

double PqCodebook::asymmetric_distance(std::span<const float> query, const PqCode& code) const {
  check_code(code.indices);
  const auto table = distance_table(query);
  double s = 0.0;
  for (std::size_t j = 0; j < m_; ++j) s += table[j * ks_ + code.indices[j]];
  return s;
}

Container PqCodebook::to_container() const {
  Container c;
  c.kind = ContainerKind::kPqCodebook;
  c.dims = {static_cast<std::uint32_t>(input_dim_), static_cast<std::uint32_t>(m_),
            static_cast<std::uint32_t>(ks_), static_cast<std::uint32_t>(dsub_)};
  c.seed = static_cast<std::uint32_t>(seed_);
  c.floats = centroids_;
  return c;
}

PqCodebook PqCodebook::from_container(const Container& c) {
  if (c.kind != ContainerKind::kPqCodebook || c.dims.size() != 4) {
    throw FormatError("container is not a PQ codebook");
  }
  PqCodebook cb;
  cb.input_dim_ = c.dims[0];
  cb.m_ = c.dims[1];
  cb.ks_ = c.dims[2];
  cb.dsub_ = c.dims[3];
  cb.seed_ = c.seed;
  if (cb.m_ == 0 || cb.ks_ == 0 || cb.ks_ > kMaxKs || cb.dsub_ * cb.m_ < cb.input_dim_ ||
      cb.dsub_ * cb.m_ >= cb.input_dim_ + cb.m_ ||
      c.floats.size() != cb.m_ * cb.ks_ * cb.dsub_) {
    throw FormatError("PQ codebook header/payload mismatch");
  }
  cb.centroids_ = c.floats;
  return cb;
}

PqCodebook pq_train(const FeatureMatrix& data, const PqTrainParams& params) {
  const std::size_t d = data.cols();
  if (params.m == 0 || params.m > d) {
    throw ConfigError("PQ needs 1 <= M <= d (M=" + std::to_string(params.m) +
                      ", d=" + std::to_string(d) + ")");
  }
  if (params.ks == 0 || params.ks > kMaxKs) throw ConfigError("PQ ks must lie in [1, 65536]");
  if (data.rows() < params.ks) {
    throw InsufficientDataError("PQ training needs N >= ks (N=" + std::to_string(data.rows()) +
                                ", ks=" + std::to_string(params.ks) + ")");
  }

  std::vector<Index> rows(data.rows());
  std::iota(rows.begin(), rows.end(), Index{0});
  if (params.max_train_points != 0 && rows.size() > params.max_train_points) {
    Rng rng = make_rng(params.seed, 0x7071);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(std::max(params.max_train_points, params.ks));
    std::sort(rows.begin(), rows.end());
  }
  const std::size_t n = rows.size();

  PqCodebook cb;
  cb.input_dim_ = d;
  cb.m_ = params.m;
  cb.ks_ = params.ks;
  cb.dsub_ = (d + params.m - 1) / params.m;
  cb.seed_ = params.seed;
  cb.centroids_.resize(cb.m_ * cb.ks_ * cb.dsub_);

  std::vector<float> sub(n * cb.dsub_);
  double err = 0.0;
  for (std::size_t j = 0; j < cb.m_; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = data.row(rows[i]);
      for (std::size_t t = 0; t < cb.dsub_; ++t) {
        const std::size_t col = j * cb.dsub_ + t;
        sub[i * cb.dsub_ + t] = col < d ? row[col] : 0.0f;
      }
    }
    KMeansParams kp;
    kp.k = cb.ks_;
    kp.seed = derive_seed(params.seed, j);
    kp.max_iter = params.max_iter;
    kp.tolerance = params.tolerance;
    auto res = kmeans(sub.data(), n, cb.dsub_, kp);
    std::copy(res.centroids.begin(), res.centroids.end(),
              cb.centroids_.begin() + static_cast<std::ptrdiff_t>(j * cb.ks_ * cb.dsub_));
    err += res.objective.back();
  }
  cb.training_error_ = err / static_cast<double>(n);
  return cb;
}

}  // namespace hashbench
