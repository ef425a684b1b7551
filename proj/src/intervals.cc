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

#include "smb/intervals.h"

namespace smb {

IntervalTable::IntervalTable(int customers, int providers)
    : customers_(customers),
      providers_(providers),
      customer_view_(static_cast<size_t>(customers) * providers),
      provider_view_(static_cast<size_t>(customers) * providers) {}

UtilityMatrix IntervalTable::Upper() const {
  UtilityMatrix u(customers_, providers_);
  for (int i = 0; i < customers_; ++i) {
    for (int j = 0; j < providers_; ++j) {
      u.set_customer_utility(i, j, customer_view(i, j).hi);
      u.set_provider_utility(j, i, provider_view(j, i).hi);
    }
  }
  return u;
}

UtilityMatrix IntervalTable::Lower() const {
  UtilityMatrix u(customers_, providers_);
  for (int i = 0; i < customers_; ++i) {
    for (int j = 0; j < providers_; ++j) {
      u.set_customer_utility(i, j, customer_view(i, j).lo);
      u.set_provider_utility(j, i, provider_view(j, i).lo);
    }
  }
  return u;
}

double IntervalTable::WidthSum(const Matching& m) const {
  double s = 0.0;
  for (const auto& [i, j] : m.pairs()) {
    s += customer_view(i, j).width() + provider_view(j, i).width();
  }
  return s;
}

bool IntervalTable::Contains(const UtilityMatrix& truth,
                             double tolerance) const {
  for (int i = 0; i < customers_; ++i) {
    for (int j = 0; j < providers_; ++j) {
      if (!customer_view(i, j).Contains(truth.customer_utility(i, j),
                                        tolerance) ||
          !provider_view(j, i).Contains(truth.provider_utility(j, i),
                                        tolerance)) {
        return false;
      }
    }
  }
  return true;
}

IntervalTable IntervalTable::Expanded() const {
  IntervalTable out = *this;
  auto widen = [](Interval& c) {
    const double w = c.width();
    c.lo -= 0.5 * w;
    c.hi += 0.5 * w;
  };
  for (Interval& c : out.customer_view_) widen(c);
  for (Interval& c : out.provider_view_) widen(c);
  return out;
}

}  // namespace smb
