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

#ifndef ADADP_DATASET_H_
#define ADADP_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adadp/random.h"

namespace adadp {

struct Dataset {
  Eigen::MatrixXd features;  // N x d, one example per row
  std::vector<int> labels;   // length N, each in [0, num_classes)
  int num_classes = 1;

  std::int64_t size() const { return features.rows(); }
  Eigen::Index feature_dim() const { return features.cols(); }

  // Throws DomainError if labels are out of range or counts disagree.
  void Validate() const;
};

// One isotropic unit-variance Gaussian blob per class. Class means sit at
// distance `separation` from each other. Labels cycle 0, 1, ..., classes-1.
Dataset SyntheticClassification(std::int64_t n, Eigen::Index d, int classes,
                                double separation, Rng& rng);

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Reads an IDX image file (unsigned bytes, N x rows x cols) and its label
// file. Pixels are scaled to [0, 1]. Throws IoError if a file cannot be
// opened and FormatError for bad magic, truncation or count mismatch.
Dataset LoadIdx(const std::string& images_path,
                const std::string& labels_path);

// Writes the IDX pair for a dataset whose features are pixels in [0, 1],
// laid out as rows x cols images.
void WriteIdx(const Dataset& data, int rows, int cols,
              const std::string& images_path, const std::string& labels_path);

}  // namespace adadp

#endif  // ADADP_DATASET_H_
