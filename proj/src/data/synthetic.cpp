// Copyright 2026 The deskml Authors
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

#include "deskml/data/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <string_view>

#include "deskml/common/rng.hpp"

namespace deskml::data {

namespace {

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& items, const std::array<double, N>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < N; ++i) {
    if (u < weights[i]) return items[i];
    u -= weights[i];
  }
  return items[N - 1];
}

std::string yes_no(bool b) { return b ? "Yes" : "No"; }

std::string money(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string synthetic_churn_csv(std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::string out =
      "customerID,gender,SeniorCitizen,Partner,Dependents,tenure,PhoneService,MultipleLines,InternetService,"
      "OnlineSecurity,OnlineBackup,DeviceProtection,TechSupport,StreamingTV,StreamingMovies,Contract,"
      "PaperlessBilling,PaymentMethod,MonthlyCharges,TotalCharges,Churn\n";

  static constexpr std::array<std::string_view, 3> kContracts{"Month-to-month", "One year", "Two year"};
  static constexpr std::array<std::string_view, 3> kInternet{"DSL", "Fiber optic", "No"};
  static constexpr std::array<std::string_view, 4> kPayment{"Electronic check", "Mailed check",
                                                            "Bank transfer (automatic)", "Credit card (automatic)"};
  std::set<std::string> ids;

  for (std::size_t r = 0; r < rows; ++r) {
    std::string id;
    do {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%04d-", static_cast<int>(rng.uniform_int(0, 9999)));
      id = buf;
      for (int k = 0; k < 5; ++k) id += static_cast<char>('A' + rng.uniform_int(0, 25));
    } while (!ids.insert(id).second);

    const bool female = rng.bernoulli(0.5);
    const bool senior = rng.bernoulli(0.16);
    const bool partner = rng.bernoulli(0.48);
    const bool dependents = rng.bernoulli(partner ? 0.5 : 0.12);
    const std::string_view contract = pick(rng, kContracts, {0.55, 0.21, 0.24});
    const double tenure_scale = contract == "Month-to-month" ? 18.0 : contract == "One year" ? 40.0 : 56.0;
    int tenure = static_cast<int>(std::round(-tenure_scale * std::log(1.0 - 0.999 * rng.uniform())));
    tenure = std::min(tenure, 72);
    if (rng.bernoulli(0.0016)) tenure = 0;
    const bool phone = rng.bernoulli(0.9);
    std::string multiple = phone ? yes_no(rng.bernoulli(0.46)) : "No phone service";
    const std::string_view internet = pick(rng, kInternet, {0.34, 0.44, 0.22});
    const bool has_net = internet != "No";
    auto addon = [&](double p) { return has_net ? yes_no(rng.bernoulli(p)) : std::string("No internet service"); };
    const std::string security = addon(0.37);
    const std::string backup = addon(0.44);
    const std::string protection = addon(0.44);
    const std::string support = addon(0.37);
    const std::string tv = addon(0.5);
    const std::string movies = addon(0.5);
    const bool paperless = rng.bernoulli(0.59);
    const std::string_view payment = pick(rng, kPayment, {0.34, 0.23, 0.22, 0.21});

    double monthly = 20.0;
    if (phone) monthly += 5.0 + (multiple == "Yes" ? 5.0 : 0.0);
    if (internet == "DSL") monthly += 25.0;
    if (internet == "Fiber optic") monthly += 45.0;
    for (const auto* s : {&security, &backup, &protection, &support, &tv, &movies}) {
      if (*s == "Yes") monthly += 5.0;
    }
    monthly = std::clamp(monthly + rng.normal(0.0, 2.5), 18.25, 118.75);

    // Intercept and effect scale give roughly 26-27% churners.
    const double effects = (contract == "Month-to-month" ? 1.6 : contract == "One year" ? 0.0 : -1.4) -
                           0.045 * tenure + (internet == "Fiber optic" ? 0.9 : 0.0) +
                           (payment == "Electronic check" ? 0.6 : 0.0) + (support == "Yes" ? -0.6 : 0.0) +
                           (security == "Yes" ? -0.5 : 0.0) + (paperless ? 0.35 : 0.0) + (senior ? 0.35 : 0.0) +
                           0.012 * (monthly - 65.0) + (dependents ? -0.2 : 0.0);
    const double logit = -2.2 + 1.4 * effects;
    const bool churn = rng.uniform() < 1.0 / (1.0 + std::exp(-logit));

    std::string total = tenure == 0 ? " " : money(std::max(monthly, monthly * tenure * (1.0 + rng.normal(0.0, 0.03))));

    out += id;
    out += ',';
    out += female ? "Female" : "Male";
    out += ',';
    out += senior ? "1" : "0";
    out += ',' + yes_no(partner) + ',' + yes_no(dependents) + ',' + std::to_string(tenure) + ',' + yes_no(phone) +
           ',' + multiple + ',' + std::string(internet) + ',' + security + ',' + backup + ',' + protection + ',' +
           support + ',' + tv + ',' + movies + ',' + std::string(contract) + ',' + yes_no(paperless) + ',' +
           std::string(payment) + ',' + money(monthly) + ',' + (tenure == 0 ? "\" \"" : total) + ',' + yes_no(churn) +
           '\n';
  }
  return out;
}

}  // namespace deskml::data
