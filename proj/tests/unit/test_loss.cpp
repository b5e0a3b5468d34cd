#include "delaynet/loss.hpp"

#include <random>

#include "delaynet/srm.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace delaynet;

namespace {

const TimeGrid kGrid{1.0, 10};
const SrmConfig kSrm{10.0, 1.0, 1.0};

Signal eps_signal() { return eval_kernels(kSrm, kGrid).eps; }

SpikeTrain train_from_bits(unsigned bits, const TimeGrid& grid) {
  SpikeTrain t = SpikeTrain::empty(grid);
  for (int k = 0; k < grid.steps; ++k) {
    t.counts[static_cast<std::size_t>(k)] = (bits >> k) & 1u;
  }
  return t;
}

// Straightforward restatement of the decoding rule, kept separate from
// the implementation: earliest first spike, then most spikes, then lowest
// index; none if fully silent.
int decode_oracle(const std::vector<SpikeTrain>& output) {
  int best = -1, best_first = -1, best_count = -1;
  for (std::size_t j = 0; j < output.size(); ++j) {
    int first = -1, count = 0;
    for (int k = 0; k < output[j].grid.steps; ++k) {
      if (output[j][k] > 0) {
        if (first < 0) first = k;
        count += output[j][k];
      }
    }
    if (first < 0) continue;
    if (best < 0 || first < best_first ||
        (first == best_first && count > best_count)) {
      best = static_cast<int>(j);
      best_first = first;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("make_target: one neuron spiking the whole window") {
  TargetSpec spec{10, kGrid};
  std::vector<SpikeTrain> target = make_target(3, spec);
  REQUIRE(target.size() == 10);
  for (int j = 0; j < 10; ++j) {
    CHECK(target[static_cast<std::size_t>(j)].total() == (j == 3 ? kGrid.steps : 0));
  }
  // Two different labels differ in exactly 2K positions.
  std::vector<SpikeTrain> other = make_target(7, spec);
  int diff = 0;
  for (int j = 0; j < 10; ++j) {
    for (int k = 0; k < kGrid.steps; ++k) {
      diff += target[static_cast<std::size_t>(j)][k] != other[static_cast<std::size_t>(j)][k] ? 1 : 0;
    }
  }
  CHECK(diff == 2 * kGrid.steps);

  CHECK_THROWS_AS(make_target(10, spec), Error);
  CHECK_THROWS_AS(make_target(-1, spec), Error);
}

TEST_CASE("loss is zero on matching outputs") {
  TargetSpec spec{10, kGrid};
  std::vector<SpikeTrain> target = make_target(4, spec);
  auto [loss, errors] = loss_and_error(target, target, eps_signal());
  CHECK(loss == 0.0);
  for (const Signal& e : errors) {
    for (double v : e.values) CHECK(v == 0.0);
  }
}

TEST_CASE("empty output against an all-ones target matches the naive oracle") {
  Signal eps = eps_signal();
  std::vector<SpikeTrain> output{SpikeTrain::empty(kGrid)};
  SpikeTrain ones = SpikeTrain::empty(kGrid);
  std::fill(ones.counts.begin(), ones.counts.end(), 1);
  std::vector<SpikeTrain> target{ones};

  auto [loss, errors] = loss_and_error(output, target, eps);

  std::vector<double> ones_real(static_cast<std::size_t>(kGrid.steps), 1.0);
  std::vector<double> a_hat = oracles::convolve_naive(eps.values, ones_real);
  double expect = 0.0;
  for (double v : a_hat) expect += v * v;
  expect *= 0.5 * kGrid.dt_ms;
  CHECK(loss == doctest::Approx(expect).epsilon(1e-12));
  for (int k = 0; k < kGrid.steps; ++k) {
    CHECK(errors[0][k] == doctest::Approx(-a_hat[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("loss is symmetric under swapping output and target") {
  std::mt19937 gen(83);
  Signal eps = eps_signal();
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<SpikeTrain> a{train_from_bits(gen() & 1023u, kGrid)};
    std::vector<SpikeTrain> b{train_from_bits(gen() & 1023u, kGrid)};
    auto [lab, ea] = loss_and_error(a, b, eps);
    auto [lba, eb] = loss_and_error(b, a, eps);
    CHECK(lab == doctest::Approx(lba).epsilon(1e-13));
    for (int k = 0; k < kGrid.steps; ++k) {
      CHECK(ea[0][k] == doctest::Approx(-eb[0][k]).epsilon(1e-13));
    }
  }
}

// Brute force over all 2^10 single-neuron outputs. Because eps(0) = 0 the
// window never sees a difference at the final step, so zero loss
// coincides with agreement on steps 0..K-2 (the convolution is injective
// on that prefix since eps(dt) != 0), not on the full window.
TEST_CASE("zero loss exactly characterizes prefix agreement (brute force)") {
  Signal eps = eps_signal();
  std::mt19937 gen(89);
  for (int t = 0; t < 4; ++t) {
    unsigned target_bits = t == 0 ? 1023u : gen() & 1023u;
    std::vector<SpikeTrain> target{train_from_bits(target_bits, kGrid)};
    for (unsigned bits = 0; bits < 1024u; ++bits) {
      std::vector<SpikeTrain> output{train_from_bits(bits, kGrid)};
      auto [loss, errors] = loss_and_error(output, target, eps);
      CHECK(loss >= 0.0);
      unsigned prefix_mask = (1u << (kGrid.steps - 1)) - 1u;
      bool prefix_equal = (bits & prefix_mask) == (target_bits & prefix_mask);
      CHECK((loss == 0.0) == prefix_equal);
    }
  }
}

TEST_CASE("decode: first spike wins, counts break ties, silence decodes to none") {
  TimeGrid grid{1.0, 10};
  std::vector<SpikeTrain> out(10, SpikeTrain::empty(grid));
  out[2] = SpikeTrain::single(grid, 1);
  out[5] = SpikeTrain::single(grid, 4);
  CHECK(decode(out).class_index == 2);

  std::vector<SpikeTrain> tie(10, SpikeTrain::empty(grid));
  // neurons 1 and 7 both first-spike at step 2; 3 spikes vs 5 spikes
  for (int k = 2; k < 5; ++k) tie[1].counts[static_cast<std::size_t>(k)] = 1;
  for (int k = 2; k < 7; ++k) tie[7].counts[static_cast<std::size_t>(k)] = 1;
  CHECK(decode(tie).class_index == 7);

  std::vector<SpikeTrain> silent(10, SpikeTrain::empty(grid));
  Prediction none = decode(silent);
  CHECK(none.is_none());
  CHECK(none.class_index == Prediction::kNone);

  // Full tie (same first spike, same count) resolves to the lowest index.
  std::vector<SpikeTrain> equal(10, SpikeTrain::empty(grid));
  equal[4] = SpikeTrain::single(grid, 3);
  equal[8] = SpikeTrain::single(grid, 3);
  CHECK(decode(equal).class_index == 4);
}

TEST_CASE("decode agrees with the rule restated, for all <=2-neuron outputs at K=4") {
  TimeGrid grid{1.0, 4};
  int cases = 0;
  // No spiking neurons.
  std::vector<SpikeTrain> silent(10, SpikeTrain::empty(grid));
  CHECK(decode(silent).class_index == decode_oracle(silent));
  ++cases;
  // Exactly one spiking neuron, every nonzero pattern.
  for (int a = 0; a < 10; ++a) {
    for (unsigned bits = 1; bits < 16u; ++bits) {
      std::vector<SpikeTrain> out(10, SpikeTrain::empty(grid));
      out[static_cast<std::size_t>(a)] = train_from_bits(bits, grid);
      CHECK(decode(out).class_index == decode_oracle(out));
      ++cases;
    }
  }
  // Exactly two spiking neurons, every pair of nonzero patterns.
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      for (unsigned ba = 1; ba < 16u; ++ba) {
        for (unsigned bb = 1; bb < 16u; ++bb) {
          std::vector<SpikeTrain> out(10, SpikeTrain::empty(grid));
          out[static_cast<std::size_t>(a)] = train_from_bits(ba, grid);
          out[static_cast<std::size_t>(b)] = train_from_bits(bb, grid);
          CHECK(decode(out).class_index == decode_oracle(out));
          ++cases;
        }
      }
    }
  }
  CHECK(cases == 1 + 10 * 15 + 45 * 15 * 15);
}

TEST_CASE("decode is stable under permuting the losing neurons") {
  std::mt19937 gen(97);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<SpikeTrain> out(10, SpikeTrain::empty(kGrid));
    for (auto& t : out) {
      if (gen() % 2) t = train_from_bits(gen() & 1023u, kGrid);
    }
    Prediction p = decode(out);
    int winner = p.class_index;
    if (winner < 0) continue;
    // Skip exact ties with the winner: there the lowest-index rule makes
    // the outcome depend on neuron identity by design.
    bool exact_tie = false;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (static_cast<int>(j) != winner &&
          p.first_spike_step[j] == p.first_spike_step[static_cast<std::size_t>(winner)] &&
          p.spike_count[j] == p.spike_count[static_cast<std::size_t>(winner)]) {
        exact_tie = true;
      }
    }
    if (exact_tie) continue;
    // Rotate every non-winning train one slot among the losers.
    std::vector<std::size_t> losers;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (static_cast<int>(j) != winner) losers.push_back(j);
    }
    std::vector<SpikeTrain> permuted = out;
    for (std::size_t i = 0; i < losers.size(); ++i) {
      permuted[losers[(i + 1) % losers.size()]] = out[losers[i]];
    }
    CHECK(decode(permuted).class_index == winner);
  }
}

TEST_CASE("decode inverts make_target") {
  TargetSpec spec{10, kGrid};
  for (int c = 0; c < 10; ++c) {
    CHECK(decode(make_target(c, spec)).class_index == c);
  }
}

TEST_CASE("flat helpers agree with the public ops") {
  std::mt19937 gen(101);
  Signal eps = eps_signal();
  SpikeTrain ones = SpikeTrain::empty(kGrid);
  std::fill(ones.counts.begin(), ones.counts.end(), 1);
  std::vector<double> target_psp = convolve_causal(eps, ones).values;

  for (int rep = 0; rep < 50; ++rep) {
    int label = static_cast<int>(gen() % 10);
    std::vector<SpikeTrain> out;
    std::vector<std::uint8_t> flat;
    for (int j = 0; j < 10; ++j) {
      SpikeTrain t = train_from_bits(gen() & 1023u, kGrid);
      for (int k = 0; k < kGrid.steps; ++k) {
        flat.push_back(static_cast<std::uint8_t>(t[k]));
      }
      out.push_back(std::move(t));
    }
    CHECK(detail::decode_flat(flat, 10, kGrid.steps) == decode(out).class_index);

    TargetSpec spec{10, kGrid};
    auto [loss, errors] = loss_and_error(out, make_target(label, spec), eps);
    std::vector<double> e_flat(static_cast<std::size_t>(10) * kGrid.steps);
    double loss_flat = detail::loss_error_flat(flat, 10, kGrid.steps, label,
                                               eps.values, target_psp,
                                               kGrid.dt_ms, e_flat);
    CHECK(loss_flat == doctest::Approx(loss).epsilon(1e-13));
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < kGrid.steps; ++k) {
        CHECK(e_flat[static_cast<std::size_t>(j) * kGrid.steps + k] ==
              doctest::Approx(errors[static_cast<std::size_t>(j)][k]).epsilon(1e-13));
      }
    }
  }
}
