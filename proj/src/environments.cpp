#include "ixbandit/environments.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ixbandit {

void ShiftBernoulliConfig::validate() const {
  if (arms != 10) throw ConfigError("shift environment is defined for 10 arms");
  if (horizon == 0) throw ConfigError("horizon must be positive");
  if (!(gap > 0.0 && gap <= 0.125)) {
    throw ConfigError("shift gap must lie in (0, 1/8] so means stay in [0,1]");
  }
}

std::vector<double> ShiftBernoulliConfig::means(std::size_t t) const {
  std::vector<double> m(arms, 0.5);
  m[8] = 0.5 - gap;
  m[9] = t <= horizon / 2 ? 0.5 + gap : 0.5 - 4.0 * gap;
  return m;
}

std::vector<double> shift_bernoulli_losses(const ShiftBernoulliConfig& config,
                                           std::size_t t,
                                           const Rng& run_stream) {
  config.validate();
  if (t < 1 || t > config.horizon) {
    throw ConfigError("round " + std::to_string(t) + " outside 1.." +
                      std::to_string(config.horizon));
  }
  const auto mean = config.means(t);
  const Rng round_stream = run_stream.derive(t);
  std::vector<double> losses(config.arms);
  for (Arm i = 0; i < config.arms; ++i) {
    losses[i] = Rng::to_unit(round_stream.at(i)) < mean[i] ? 1.0 : 0.0;
  }
  return losses;
}

std::span<const double> oblivious_losses(const LossMatrix& matrix,
                                         std::size_t t) {
  if (t < 1 || t > matrix.horizon()) {
    throw ConfigError("round " + std::to_string(t) + " outside 1.." +
                      std::to_string(matrix.horizon()));
  }
  return matrix.row(t - 1);
}

std::vector<double> adaptive_losses(const AdaptiveLossFn& callback,
                                    std::size_t arms, std::size_t t,
                                    std::span<const Arm> history) {
  if (t < 1) throw ConfigError("rounds are numbered from 1");
  if (history.size() != t - 1) {
    throw ConfigError("round " + std::to_string(t) + " needs " +
                      std::to_string(t - 1) + " past actions, got " +
                      std::to_string(history.size()));
  }
  auto losses = callback(t, history);
  if (losses.size() != arms) {
    throw ConfigError("adaptive adversary returned " +
                      std::to_string(losses.size()) + " losses for " +
                      std::to_string(arms) + " arms");
  }
  for (double l : losses) {
    if (!(l >= 0.0 && l <= 1.0)) {
      throw ConfigError("adaptive adversary returned loss " +
                        std::to_string(l) + " outside [0,1]");
    }
  }
  return losses;
}

std::vector<double> ObliviousEnvironment::losses(std::size_t t,
                                                 std::span<const Arm>) {
  const auto row = oblivious_losses(matrix_, t);
  return {row.begin(), row.end()};
}

ShiftBernoulliEnvironment::ShiftBernoulliEnvironment(
    ShiftBernoulliConfig config, Rng run_stream)
    : config_(config), stream_(run_stream) {
  config_.validate();
}

std::vector<double> ShiftBernoulliEnvironment::losses(std::size_t t,
                                                      std::span<const Arm>) {
  return shift_bernoulli_losses(config_, t, stream_);
}

AdaptiveEnvironment::AdaptiveEnvironment(std::size_t arms,
                                         AdaptiveLossFn callback)
    : arms_(arms), callback_(std::move(callback)) {
  if (arms_ == 0) throw ConfigError("environment needs at least one arm");
  if (!callback_) throw ConfigError("adaptive environment needs a callback");
}

std::vector<double> AdaptiveEnvironment::losses(std::size_t t,
                                                std::span<const Arm> history) {
  return adaptive_losses(callback_, arms_, t, history);
}

LossMatrix parse_loss_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t arms = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t fields = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::size_t b = pos;
      std::size_t e = end;
      while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
      while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + b, line.data() + e, v);
      if (ec != std::errc() || ptr != line.data() + e || b == e) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": field " +
                          std::to_string(fields + 1) + " is not a number");
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": loss " +
                          line.substr(b, e - b) + " outside [0,1]");
      }
      values.push_back(v);
      ++fields;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      arms = fields;
    } else if (fields != arms) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(arms) + " columns, found " +
                        std::to_string(fields));
    }
    ++rows;
  }
  if (rows == 0) throw ConfigError(source + ": no loss rows");
  return LossMatrix(rows, arms, std::move(values));
}

LossMatrix load_loss_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open loss matrix '" + path + "'");
  return parse_loss_csv(in, path);
}

void write_loss_csv(const LossMatrix& matrix, std::ostream& out) {
  std::ostringstream buf;
  buf.precision(17);
  for (std::size_t t = 0; t < matrix.horizon(); ++t) {
    for (Arm i = 0; i < matrix.arms(); ++i) {
      if (i) buf << ',';
      buf << matrix.at(t, i);
    }
    buf << '\n';
  }
  out << buf.str();
}

}  // namespace ixbandit
