#include "metaradar/signal_model.hpp"

#include <stdexcept>
#include <string>

namespace metaradar {

ShiftMatrix::ShiftMatrix(int delay, const DelayWindow& window)
    : offset_(delay - window.min_delay), window_(window) {
  if (window.waveform_len < 1 || window.received_len < window.waveform_len)
    throw std::domain_error("shift matrix: invalid delay window");
  if (offset_ < 0 || offset_ > window.max_offset())
    throw std::domain_error("shift matrix: delay " + std::to_string(delay) +
                            " outside feasible window [" + std::to_string(window.min_delay) +
                            ", " + std::to_string(window.min_delay + window.max_offset()) + "]");
}

CMat ShiftMatrix::apply_right(const CMat& x) const {
  if (x.cols() != window_.waveform_len)
    throw std::invalid_argument("shift matrix: column count must equal waveform length");
  CMat out = CMat::Zero(x.rows(), window_.received_len);
  out.middleCols(offset_, window_.waveform_len) = x;
  return out;
}

RMat ShiftMatrix::dense() const {
  RMat j = RMat::Zero(window_.waveform_len, window_.received_len);
  for (int l = 0; l < window_.waveform_len; ++l) j(l, l + offset_) = 1.0;
  return j;
}

namespace {

void check_path(const TargetPath& path) {
  if (path.transmit_gain.size() != path.receive_gain.size())
    throw std::invalid_argument("target path: transmit/receive gain sizes differ");
}

}  // namespace

CMat q_matrix(const TargetPath& path) {
  check_path(path);
  const int n = static_cast<int>(path.transmit_gain.size());
  const int l = path.shift.window().waveform_len;
  const int lr = path.shift.window().received_len;
  const CMat spatial = path.receive_gain.transpose() * path.transmit_gain;  // N x N
  const RMat jt = path.shift.dense().transpose();                           // L_R x L
  CMat q = CMat::Zero(static_cast<Eigen::Index>(n) * lr, static_cast<Eigen::Index>(n) * l);
  for (int a = 0; a < lr; ++a)
    for (int b = 0; b < l; ++b)
      if (jt(a, b) != 0.0) q.block(a * n, b * n, n, n) = jt(a, b) * spatial;
  return q;
}

CVec apply_q(const TargetPath& path, const CMat& waveform_matrix) {
  check_path(path);
  if (waveform_matrix.rows() != path.transmit_gain.size())
    throw std::invalid_argument("apply_q: waveform row count must equal antenna count");
  const CRowVec row = path.transmit_gain * waveform_matrix;          // 1 x L
  const CMat shifted = path.shift.apply_right(row);                  // 1 x L_R
  const CMat y = path.receive_gain.transpose() * shifted;            // N x L_R
  return vec_of(y);
}

CMat response_matrix(std::span<const TargetPath> paths, const CMat& waveform_matrix) {
  const Eigen::Index n = waveform_matrix.rows();
  const Eigen::Index lr = paths.empty() ? 0 : paths[0].shift.window().received_len;
  CMat f(n * lr, static_cast<Eigen::Index>(paths.size()));
  for (std::size_t k = 0; k < paths.size(); ++k) f.col(k) = apply_q(paths[k], waveform_matrix);
  return f;
}

CMat mean_received(std::span<const TargetPath> paths, const CVec& responses,
                   const CMat& waveform_matrix, const DelayWindow& window) {
  if (static_cast<Eigen::Index>(paths.size()) != responses.size())
    throw std::invalid_argument("mean_received: one response per target required");
  CMat y = CMat::Zero(waveform_matrix.rows(), window.received_len);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const CRowVec row = paths[k].transmit_gain * waveform_matrix;
    y += responses[k] * (paths[k].receive_gain.transpose() * paths[k].shift.apply_right(row));
  }
  return y;
}

ReceivedSignal synthesize_received(std::span<const TargetPath> paths, const CVec& responses,
                                   const CMat& waveform_matrix, const DelayWindow& window,
                                   double noise_variance, std::mt19937_64& rng) {
  if (noise_variance < 0.0)
    throw std::domain_error("synthesize_received: negative noise variance");
  ReceivedSignal out;
  out.samples = mean_received(paths, responses, waveform_matrix, window);
  if (noise_variance > 0.0) {
    // Rows of V are i.i.d.; draw row-major so the stream is stable under
    // a fixed seed.
    for (Eigen::Index r = 0; r < out.samples.rows(); ++r)
      for (Eigen::Index c = 0; c < out.samples.cols(); ++c)
        out.samples(r, c) += complex_normal(rng, noise_variance);
  }
  return out;
}

}  // namespace metaradar
