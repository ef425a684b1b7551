// Copyright 2026 The smb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SMB_INTERVALS_H_
#define SMB_INTERVALS_H_

#include <vector>

#include "smb/market.h"

namespace smb {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  bool Contains(double x, double tolerance = 0.0) const {
    return x >= lo - tolerance && x <= hi + tolerance;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Per-pair intervals for both orientations of every customer-provider pair.
class IntervalTable {
 public:
  IntervalTable() = default;
  IntervalTable(int customers, int providers);

  int customers() const { return customers_; }
  int providers() const { return providers_; }

  // Interval on u_i(j).
  Interval& customer_view(int i, int j) {
    return customer_view_[static_cast<size_t>(i) * providers_ + j];
  }
  const Interval& customer_view(int i, int j) const {
    return customer_view_[static_cast<size_t>(i) * providers_ + j];
  }
  // Interval on u_j(i).
  Interval& provider_view(int j, int i) {
    return provider_view_[static_cast<size_t>(j) * customers_ + i];
  }
  const Interval& provider_view(int j, int i) const {
    return provider_view_[static_cast<size_t>(j) * customers_ + i];
  }

  // Matrix of upper endpoints.
  UtilityMatrix Upper() const;
  // Matrix of lower endpoints.
  UtilityMatrix Lower() const;

  // Sum of widths over both orientations of every matched pair.
  double WidthSum(const Matching& m) const;

  // Every interval contains the corresponding true utility.
  bool Contains(const UtilityMatrix& truth, double tolerance = 1e-12) const;

  // Same centers, twice the width, not clipped.
  IntervalTable Expanded() const;

 private:
  int customers_ = 0;
  int providers_ = 0;
  std::vector<Interval> customer_view_;
  std::vector<Interval> provider_view_;
};

}  // namespace smb

#endif  // SMB_INTERVALS_H_
