// Copyright 2026 The AdaDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adadp/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "adadp/errors.h"

namespace adadp {
namespace {

std::vector<unsigned char> ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::uint32_t ReadBigEndian32(const std::vector<unsigned char>& bytes,
                              std::size_t offset, const std::string& path) {
  if (bytes.size() < offset + 4) {
    throw FormatError(path + ": truncated header");
  }
  return (std::uint32_t{bytes[offset]} << 24) |
         (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) |
         std::uint32_t{bytes[offset + 3]};
}

void WriteBigEndian32(std::ofstream& out, std::uint32_t value) {
  const char bytes[4] = {static_cast<char>(value >> 24),
                         static_cast<char>(value >> 16),
                         static_cast<char>(value >> 8),
                         static_cast<char>(value)};
  out.write(bytes, 4);
}

}  // namespace

void Dataset::Validate() const {
  if (features.rows() < 1) throw DomainError("dataset is empty");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw DomainError("label count differs from example count");
  }
  if (num_classes < 1) throw DomainError("num_classes must be >= 1");
  for (int label : labels) {
    if (label < 0 || label >= num_classes) {
      throw DomainError("label " + std::to_string(label) + " out of range");
    }
  }
}

Dataset SyntheticClassification(std::int64_t n, Eigen::Index d, int classes,
                                double separation, Rng& rng) {
  if (n < 1 || d < 1 || classes < 1) {
    throw DomainError("n, d and classes must be >= 1");
  }
  // Orthogonal unit directions when they fit, random unit directions
  // otherwise; scaled so that orthogonal means are `separation` apart.
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(classes, d);
  for (int k = 0; k < classes; ++k) {
    if (k < d) {
      means(k, k) = 1.0;
    } else {
      for (Eigen::Index j = 0; j < d; ++j) means(k, j) = rng.Normal();
      means.row(k).normalize();
    }
  }
  means *= separation / std::sqrt(2.0);

  Dataset data;
  data.num_classes = classes;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % classes);
    data.labels[i] = label;
    for (Eigen::Index j = 0; j < d; ++j) {
      data.features(i, j) = means(label, j) + rng.Normal();
    }
  }
  return data;
}

Dataset LoadIdx(const std::string& images_path,
                const std::string& labels_path) {
  const std::vector<unsigned char> images = ReadAll(images_path);
  const std::vector<unsigned char> labels = ReadAll(labels_path);

  if (ReadBigEndian32(images, 0, images_path) != kIdxImagesMagic) {
    throw FormatError(images_path + ": bad magic number for IDX images");
  }
  if (ReadBigEndian32(labels, 0, labels_path) != kIdxLabelsMagic) {
    throw FormatError(labels_path + ": bad magic number for IDX labels");
  }
  const std::uint64_t count = ReadBigEndian32(images, 4, images_path);
  const std::uint64_t rows = ReadBigEndian32(images, 8, images_path);
  const std::uint64_t cols = ReadBigEndian32(images, 12, images_path);
  const std::uint64_t label_count = ReadBigEndian32(labels, 4, labels_path);
  if (count != label_count) {
    throw FormatError("image count " + std::to_string(count) +
                      " differs from label count " +
                      std::to_string(label_count));
  }
  const std::uint64_t pixels = rows * cols;
  if (images.size() < 16 + count * pixels) {
    throw FormatError(images_path + ": truncated pixel payload");
  }
  if (labels.size() < 8 + count) {
    throw FormatError(labels_path + ": truncated label payload");
  }
  if (count == 0) throw FormatError(images_path + ": no examples");

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(count),
                       static_cast<Eigen::Index>(pixels));
  data.labels.resize(count);
  int max_label = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint64_t p = 0; p < pixels; ++p) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          images[16 + i * pixels + p] / 255.0;
    }
    data.labels[i] = labels[8 + i];
    max_label = std::max(max_label, data.labels[i]);
  }
  data.num_classes = max_label + 1;
  return data;
}

void WriteIdx(const Dataset& data, int rows, int cols,
              const std::string& images_path, const std::string& labels_path) {
  data.Validate();
  if (static_cast<Eigen::Index>(rows) * cols != data.feature_dim()) {
    throw DimensionError("rows * cols must equal the feature dimension");
  }
  std::ofstream images(images_path, std::ios::binary);
  std::ofstream labels(labels_path, std::ios::binary);
  if (!images || !labels) throw IoError("cannot write IDX files");
  const auto n = static_cast<std::uint32_t>(data.size());
  WriteBigEndian32(images, kIdxImagesMagic);
  WriteBigEndian32(images, n);
  WriteBigEndian32(images, static_cast<std::uint32_t>(rows));
  WriteBigEndian32(images, static_cast<std::uint32_t>(cols));
  WriteBigEndian32(labels, kIdxLabelsMagic);
  WriteBigEndian32(labels, n);
  for (std::int64_t i = 0; i < data.size(); ++i) {
    for (Eigen::Index p = 0; p < data.feature_dim(); ++p) {
      const double v = std::clamp(data.features(i, p), 0.0, 1.0);
      images.put(static_cast<char>(std::lround(v * 255.0)));
    }
    labels.put(static_cast<char>(data.labels[i]));
  }
  if (!images || !labels) throw IoError("failed writing IDX files");
}

}  // namespace adadp
