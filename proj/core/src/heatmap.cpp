#include "rope/heatmap.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace rope {

namespace {

void CheckShape(const HeatmapStack& a, const HeatmapStack& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("heatmap shape mismatch");
}

}  // namespace

HeatmapStack MakeGaussianStack(const std::vector<Landmark2D>& landmarks, int width,
                               int height, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  if (width < 1 || height < 1) throw std::invalid_argument("heatmap size must be >= 1");

  HeatmapStack stack;
  stack.width = width;
  stack.height = height;
  stack.channels = static_cast<int>(landmarks.size());
  stack.normalized = true;
  stack.values.resize(stack.ChannelSize() * landmarks.size());

  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (int k = 0; k < stack.channels; ++k) {
    const Eigen::Vector2d c = landmarks[k].coords;
    double sum = 0.0;
    for (int y = 0; y < height; ++y) {
      const double dy2 = (y - c.y()) * (y - c.y());
      for (int x = 0; x < width; ++x) {
        const double dx2 = (x - c.x()) * (x - c.x());
        const double v = std::exp(-(dx2 + dy2) * inv2s2);
        stack.At(k, y, x) = static_cast<float>(v);
        sum += v;
      }
    }
    // Landmark far outside the crop: tail mass can underflow entirely.
    if (sum <= 0.0) {
      const float uniform = 1.0f / static_cast<float>(stack.ChannelSize());
      for (size_t i = 0; i < stack.ChannelSize(); ++i)
        stack.values[k * stack.ChannelSize() + i] = uniform;
      continue;
    }
    const double inv = 1.0 / sum;
    for (size_t i = 0; i < stack.ChannelSize(); ++i)
      stack.values[k * stack.ChannelSize() + i] =
          static_cast<float>(stack.values[k * stack.ChannelSize() + i] * inv);
  }
  return stack;
}

HeatmapStack SoftmaxChannels(const HeatmapStack& stack) {
  HeatmapStack out = stack;
  out.normalized = true;
  for (int k = 0; k < stack.channels; ++k) {
    const size_t base = k * stack.ChannelSize();
    float maxv = stack.values[base];
    for (size_t i = 1; i < stack.ChannelSize(); ++i)
      maxv = std::max(maxv, stack.values[base + i]);
    double sum = 0.0;
    for (size_t i = 0; i < stack.ChannelSize(); ++i) {
      const double e = std::exp(static_cast<double>(stack.values[base + i]) - maxv);
      out.values[base + i] = static_cast<float>(e);
      sum += e;
    }
    const double inv = 1.0 / sum;
    for (size_t i = 0; i < stack.ChannelSize(); ++i)
      out.values[base + i] = static_cast<float>(out.values[base + i] * inv);
  }
  return out;
}

HeatmapStack NormalizeChannels(const HeatmapStack& stack) {
  HeatmapStack out = stack;
  out.normalized = true;
  for (int k = 0; k < stack.channels; ++k) {
    const size_t base = k * stack.ChannelSize();
    double sum = 0.0;
    for (size_t i = 0; i < stack.ChannelSize(); ++i) {
      if (stack.values[base + i] < 0.0f)
        throw std::invalid_argument("sum-normalization requires non-negative values");
      sum += stack.values[base + i];
    }
    if (sum <= 0.0) {
      const float uniform = 1.0f / static_cast<float>(stack.ChannelSize());
      for (size_t i = 0; i < stack.ChannelSize(); ++i) out.values[base + i] = uniform;
      continue;
    }
    const double inv = 1.0 / sum;
    for (size_t i = 0; i < stack.ChannelSize(); ++i)
      out.values[base + i] = static_cast<float>(stack.values[base + i] * inv);
  }
  return out;
}

double JsdLoss(const HeatmapStack& pred, const HeatmapStack& gt) {
  CheckShape(pred, gt);
  if (!pred.normalized || !gt.normalized)
    throw std::invalid_argument("jsd requires normalized stacks");

  double total = 0.0;
  for (int k = 0; k < pred.channels; ++k) {
    const size_t base = k * pred.ChannelSize();
    double jsd = 0.0;
    for (size_t i = 0; i < pred.ChannelSize(); ++i) {
      const double p = pred.values[base + i];
      const double q = gt.values[base + i];
      const double m = 0.5 * (p + q);
      if (p > 0.0) jsd += 0.5 * p * std::log(p / m);
      if (q > 0.0) jsd += 0.5 * q * std::log(q / m);
    }
    total += jsd;
  }
  return total / pred.channels;
}

DecodedLandmarks DecodeExpectation(const HeatmapStack& stack) {
  const HeatmapStack& s = stack;
  HeatmapStack normalized_copy;
  const HeatmapStack* src = &s;
  if (!stack.normalized) {
    normalized_copy = NormalizeChannels(stack);
    src = &normalized_copy;
  }

  DecodedLandmarks out;
  out.coords.reserve(src->channels);
  out.peak_mass.reserve(src->channels);
  for (int k = 0; k < src->channels; ++k) {
    double ex = 0.0, ey = 0.0, peak = 0.0;
    for (int y = 0; y < src->height; ++y)
      for (int x = 0; x < src->width; ++x) {
        const double p = src->At(k, y, x);
        ex += p * x;
        ey += p * y;
        peak = std::max(peak, p);
      }
    out.coords.push_back({k, {ex, ey}});
    out.peak_mass.push_back(peak);
  }
  return out;
}

DecodedLandmarks DecodeArgmax(const HeatmapStack& stack) {
  DecodedLandmarks out;
  out.coords.reserve(stack.channels);
  out.peak_mass.reserve(stack.channels);
  for (int k = 0; k < stack.channels; ++k) {
    int bx = 0, by = 0;
    float best = stack.At(k, 0, 0);
    for (int y = 0; y < stack.height; ++y)
      for (int x = 0; x < stack.width; ++x)
        if (stack.At(k, y, x) > best) {
          best = stack.At(k, y, x);
          bx = x;
          by = y;
        }
    out.coords.push_back({k, {static_cast<double>(bx), static_cast<double>(by)}});
    out.peak_mass.push_back(best);
  }
  return out;
}

void SaveRhmp(const HeatmapStack& stack, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write heatmap file: " + path);
  out.write("RHMP", 4);
  const uint8_t version = 1;
  out.write(reinterpret_cast<const char*>(&version), 1);
  const uint32_t dims[3] = {static_cast<uint32_t>(stack.channels),
                            static_cast<uint32_t>(stack.height),
                            static_cast<uint32_t>(stack.width)};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(stack.values.data()),
            static_cast<std::streamsize>(stack.values.size() * sizeof(float)));
  const uint8_t flag = stack.normalized ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&flag), 1);
  if (!out) throw std::runtime_error("short write on heatmap file: " + path);
}

HeatmapStack LoadRhmp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open heatmap file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RHMP", 4) != 0)
    throw std::runtime_error("bad magic in heatmap file: " + path);
  uint8_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 1);
  if (version != 1) throw std::runtime_error("unsupported heatmap version: " + path);
  uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  HeatmapStack stack;
  stack.channels = static_cast<int>(dims[0]);
  stack.height = static_cast<int>(dims[1]);
  stack.width = static_cast<int>(dims[2]);
  stack.values.resize(static_cast<size_t>(dims[0]) * dims[1] * dims[2]);
  in.read(reinterpret_cast<char*>(stack.values.data()),
          static_cast<std::streamsize>(stack.values.size() * sizeof(float)));
  uint8_t flag = 0;
  in.read(reinterpret_cast<char*>(&flag), 1);
  if (!in) throw std::runtime_error("truncated heatmap file: " + path);
  stack.normalized = flag != 0;
  return stack;
}

}  // namespace rope
