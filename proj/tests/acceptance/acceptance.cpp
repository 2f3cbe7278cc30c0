// Acceptance run: prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Thresholds are pinned below.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "../oracle.hpp"
#include "ravenforge/corpus.hpp"
#include "ravenforge/error.hpp"
#include "ravenforge/npz.hpp"
#include "ravenforge/render.hpp"
#include "ravenforge/solver.hpp"

using namespace ravenforge;
namespace fs = std::filesystem;

namespace {

constexpr std::int64_t kTimedInstances = 1000;
constexpr double kTimedLimitSeconds = 60.0;
constexpr int kSolvablePerKindAndConfiguration = 1000;
constexpr std::int64_t kRegimeCorpus = 700;
constexpr std::int64_t kMeshCorpus = 1000;
constexpr std::int64_t kImpartialCorpus = 1000;
constexpr double kChiSquareCritical = oracle::kChiSquare7At01;  // df 7, p = 0.01
constexpr std::uint64_t kSeed = 20240917;

int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ravenforge_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// FNV-1a over sorted relative paths and contents.
std::uint64_t tree_hash(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint8_t b) { h = (h ^ b) * 0x100000001b3ULL; };
  for (const auto& f : files) {
    for (char c : f.generic_string()) mix(static_cast<std::uint8_t>(c));
    mix(0);
    for (std::uint8_t b : read_file(root / f)) mix(b);
  }
  return h;
}

CorpusJob job(const RegimeSpec& regime, std::int64_t n, const fs::path& out, int workers) {
  CorpusJob j;
  j.regime = regime;
  j.total = n;
  j.seed = kSeed;
  j.out = out;
  j.workers = workers;
  return j;
}

std::vector<RegimeSpec> all_regimes() {
  return {RegimeSpec::iraven(),
          RegimeSpec::mesh(),
          RegimeSpec::attributeless(Attribute::Color),
          RegimeSpec::attributeless(Attribute::Position),
          RegimeSpec::attributeless(Attribute::Size),
          RegimeSpec::attributeless(Attribute::Type)};
}

// Independent rule bit layout.
std::vector<std::uint8_t> expected_bits(const std::vector<RuleAssignment>& as, bool mesh) {
  std::vector<std::uint8_t> bits(mesh ? 48 : 40, 0);
  for (const auto& a : as) {
    const int r = static_cast<int>(a.rule.type);
    const int i = a.component == kMeshComponent ? 40 + (a.attribute == Attribute::Position ? 0 : 4) + r
                                                : a.component * 20 + static_cast<int>(a.attribute) * 4 + r;
    bits[static_cast<std::size_t>(i)] = 1;
  }
  return bits;
}

bool base_equal(const SymbolicPanel& a, const SymbolicPanel& b) {
  if (a.component_count != b.component_count) return false;
  for (int c = 0; c < a.component_count; ++c)
    if (!(a.components[static_cast<std::size_t>(c)] == b.components[static_cast<std::size_t>(c)])) return false;
  return true;
}

// Answers sharing the correct value, per governed attribute; true when
// exactly three attributes split 4/4 and the rest agree everywhere.
bool impartial_counts(const SymbolicMatrix& m) {
  int split = 0;
  for (const auto& a : m.assignments) {
    int same = 0;
    for (const auto& p : m.answers)
      same += oracle::value(p, a.component, a.attribute) == oracle::value(m.correct(), a.component, a.attribute);
    if (same == 4) ++split;
    else if (same != 8) return false;
  }
  return split == 3;
}

const std::uint8_t* panel(const InstanceRecord& r, int i) {
  return r.image.data() + static_cast<std::ptrdiff_t>(i) * kPanelPixels;
}

std::string npy_header(const std::vector<std::uint8_t>& npy) {
  const std::size_t len = npy[8] | (std::size_t{npy[9]} << 8);
  return std::string(npy.begin() + 10, npy.begin() + 10 + static_cast<std::ptrdiff_t>(len));
}

void determinism() {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const auto t0 = std::chrono::steady_clock::now();
  generate_corpus(job(RegimeSpec::iraven(), kTimedInstances, a, 1));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  generate_corpus(job(RegimeSpec::iraven(), kTimedInstances, b, 4));
  const std::uint64_t ha = tree_hash(a);
  const std::uint64_t hb = tree_hash(b);

  const fs::path c = scratch("det_c");
  const fs::path d = scratch("det_d");
  generate_corpus(job(RegimeSpec::mesh(), 140, c, 2));
  generate_corpus(job(RegimeSpec::mesh(), 140, d, 1));
  const bool mesh_same = tree_hash(c) == tree_hash(d);

  char buf[200];
  std::snprintf(buf, sizeof buf, "hash %016llx vs %016llx (1 vs 4 workers), mesh rerun %s, %lld instances in %.2fs (limit %.0fs)",
                static_cast<unsigned long long>(ha), static_cast<unsigned long long>(hb), mesh_same ? "identical" : "differs",
                static_cast<long long>(kTimedInstances), seconds, kTimedLimitSeconds);
  report(ha == hb && mesh_same && seconds < kTimedLimitSeconds, "determinism", buf);
  for (const auto& p : {b, c, d}) fs::remove_all(p);
}

// Criteria checked on every generated matrix: the stored target is the
// solver's unique answer, and the rules vector matches the assignments.
void solvability_and_encoding() {
  std::int64_t total = 0, wrong = 0, ambiguous = 0, unsolvable = 0, oracle_disagrees = 0;
  std::int64_t encoding_bad = 0;
  std::set<int> lengths_plain, lengths_mesh;
  for (const RegimeSpec& regime : all_regimes())
    for (Configuration c : kConfigurations)
      for (int i = 0; i < kSolvablePerKindAndConfiguration; ++i) {
        const InstanceSpec spec{c, kSplits[static_cast<std::size_t>(i % 3)], i,
                                instance_seed(kSeed + static_cast<std::uint64_t>(regime.kind()) * 97 +
                                                  static_cast<std::uint64_t>(regime.held_out().value_or(Attribute::Position)),
                                              c, i)};
        const SymbolicMatrix m = generate_matrix(regime, spec).matrix;
        ++total;
        try {
          if (solve(solver_input(m)) != m.target) ++wrong;
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::Ambiguous) ++ambiguous;
          else ++unsolvable;
        }
        int completing = 0;
        for (const auto& p : m.answers) completing += oracle::satisfies_all(m, p);
        if (completing != 1 || !oracle::satisfies_all(m, m.correct())) ++oracle_disagrees;

        const RuleEncoding enc = encode_rules(m.assignments, regime.kind());
        std::vector<RuleAssignment> doubled = m.assignments;
        doubled.insert(doubled.end(), m.assignments.begin(), m.assignments.end());
        const bool ok = enc.bits == expected_bits(m.assignments, regime.has_mesh()) &&
                        enc.popcount() == static_cast<int>(m.assignments.size()) &&
                        encode_rules(doubled, regime.kind()) == enc;
        encoding_bad += !ok;
        (regime.has_mesh() ? lengths_mesh : lengths_plain).insert(enc.dimension());
      }

  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%lld instances (%d per regime per configuration): %lld wrong, %lld ambiguous, %lld unsolvable, "
                "%lld rejected by the test oracle",
                static_cast<long long>(total), kSolvablePerKindAndConfiguration, static_cast<long long>(wrong),
                static_cast<long long>(ambiguous), static_cast<long long>(unsolvable),
                static_cast<long long>(oracle_disagrees));
  report(wrong + ambiguous + unsolvable + oracle_disagrees == 0, "unique-solvability", buf);

  const bool lengths = lengths_plain == std::set<int>{40} && lengths_mesh == std::set<int>{48};
  std::snprintf(buf, sizeof buf,
                "lengths %s (plain) / %s (mesh), %lld of %lld instances with popcount, layout or OR-idempotence errors",
                lengths_plain == std::set<int>{40} ? "40" : "mixed", lengths_mesh == std::set<int>{48} ? "48" : "mixed",
                static_cast<long long>(encoding_bad), static_cast<long long>(total));
  report(lengths && encoding_bad == 0, "encoding", buf);
}

void regime_audit() {
  std::string detail;
  bool pass = true;
  for (Attribute held : {Attribute::Color, Attribute::Position, Attribute::Size, Attribute::Type}) {
    const RegimeSpec regime = RegimeSpec::attributeless(held);
    const fs::path dir = scratch("regime");
    generate_corpus(job(regime, kRegimeCorpus, dir, 0));
    const std::vector<Attribute> attrs = held == Attribute::Position
                                             ? std::vector<Attribute>{Attribute::Position, Attribute::Number}
                                             : std::vector<Attribute>{held};
    std::int64_t train = 0, train_ok = 0, test = 0, test_constant = 0, test_missing = 0;
    for (const auto& path : list_instances(dir)) {
      const InstanceRecord r = read_instance(path);
      const Configuration cfg = r.meta->configuration;
      auto bit = [&](int c, Attribute a, RuleType t) {
        return r.rules.bits[static_cast<std::size_t>(c * 20 + static_cast<int>(a) * 4 + static_cast<int>(t))] != 0;
      };
      bool all_constant = true, any_constant = false, any_other = false, any_governable = false;
      for (int c = 0; c < component_count(cfg); ++c) {
        const bool governable = held != Attribute::Position || oracle::slot_count(cfg, c) > 1;
        if (!governable) continue;
        any_governable = true;
        bool constant_here = false;
        for (Attribute a : attrs) {
          constant_here |= bit(c, a, RuleType::Constant);
          for (RuleType t : {RuleType::Progression, RuleType::Arithmetic, RuleType::DistributeThree})
            any_other |= bit(c, a, t);
        }
        all_constant &= constant_here;
        any_constant |= constant_here;
      }
      if (r.meta->split == Split::Test) {
        ++test;
        test_constant += any_constant;
        test_missing += any_governable && !any_other;
      } else {
        ++train;
        train_ok += all_constant && !any_other;
      }
    }
    fs::remove_all(dir);
    const bool ok = train == kRegimeCorpus / 5 * 4 && train_ok == train && test_constant == 0 && test_missing == 0;
    pass &= ok;
    std::string label(to_string(held));
    std::transform(label.begin(), label.end(), label.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    char buf[200];
    std::snprintf(buf, sizeof buf, "%sa-%s train/val %lld/%lld Constant, test %lld/%lld Constant",
                  detail.empty() ? "" : "; ", label.c_str(), static_cast<long long>(train_ok),
                  static_cast<long long>(train), static_cast<long long>(test_constant), static_cast<long long>(test));
    detail += buf;
  }
  report(pass, "regime-audit", detail);
}

void mesh_guarantee() {
  const fs::path dir = scratch("mesh");
  generate_corpus(job(RegimeSpec::mesh(), kMeshCorpus, dir, 0));
  std::int64_t n = 0, symbolic = 0, pixel = 0;
  for (const auto& path : list_instances(dir)) {
    const InstanceRecord r = read_instance(path);
    const SymbolicMatrix& m = *r.meta->matrix;
    ++n;
    bool sym = false, pix = false;
    for (int d = 0; d < kAnswerPanels; ++d) {
      if (d == m.target) continue;
      const SymbolicPanel& p = m.answers[static_cast<std::size_t>(d)];
      if (!base_equal(p, m.correct()) || p.mesh == m.correct().mesh) continue;
      sym = true;
      // Stored pixels differ, and only where one of the two panels draws a mesh line.
      const std::uint8_t* a = panel(r, kContextPanels + m.target);
      const std::uint8_t* b = panel(r, kContextPanels + d);
      const PanelImage ma = mesh_mask(*m.correct().mesh);
      const PanelImage mb = mesh_mask(*p.mesh);
      int differ = 0;
      bool outside = false;
      for (int i = 0; i < kPanelPixels; ++i) {
        if (a[i] == b[i]) continue;
        ++differ;
        const bool line = a[i] == 0 || b[i] == 0;
        outside |= !line || !(ma.pixels[static_cast<std::size_t>(i)] || mb.pixels[static_cast<std::size_t>(i)]);
      }
      pix |= differ > 0 && !outside;
    }
    symbolic += sym;
    pixel += pix;
  }
  fs::remove_all(dir);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld/%lld instances with a mesh-only distractor symbolically, %lld/%lld by masked pixel diff",
                static_cast<long long>(symbolic), static_cast<long long>(n), static_cast<long long>(pixel),
                static_cast<long long>(n));
  report(n == kMeshCorpus && symbolic == n && pixel == n, "mesh-guarantee", buf);
}

void format(const fs::path& corpus) {
  const std::regex name(R"(RAVEN_(\d+)_(train|val|test)\.npz)");
  std::map<std::string, std::int64_t> splits;
  std::int64_t n = 0, bad_name = 0, bad_round_trip = 0, bad_member = 0;
  for (const auto& path : list_instances(corpus)) {
    ++n;
    std::smatch match;
    const std::string file = path.filename().string();
    if (!std::regex_match(file, match, name)) {
      ++bad_name;
      continue;
    }
    ++splits[match[2]];
    const auto bytes = read_file(path);
    const InstanceRecord r = decode_instance(bytes);
    if (encode_instance(r) != bytes || !(decode_instance(encode_instance(r)) == r)) ++bad_round_trip;
    bool image_ok = false;
    for (const auto& e : decode_zip(bytes))
      if (e.name == "image.npy") {
        const std::string h = npy_header(e.data);
        image_ok = e.data[6] == 1 && h.find("'descr': '|u1'") != std::string::npos &&
                   h.find("'shape': (16, 80, 80)") != std::string::npos &&
                   e.data.size() == 10 + h.size() + 16 * 80 * 80;
      }
    bad_member += !image_ok;
  }
  bool ratios = splits["train"] == 3 * splits["val"] && splits["val"] == splits["test"] && n == kTimedInstances;
  // The same ratio at other scaled totals.
  for (std::int64_t total : {70, 700, 70000}) {
    const SplitPlan plan = plan_splits(total, std::vector<Configuration>(kConfigurations.begin(), kConfigurations.end()));
    ratios &= plan.totals[0] == total * 3 / 5 && plan.totals[1] == total / 5 && plan.totals[2] == total / 5;
  }
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%lld files, %lld bad names, %lld round-trip mismatches, %lld bad image members, split %lld/%lld/%lld",
                static_cast<long long>(n), static_cast<long long>(bad_name), static_cast<long long>(bad_round_trip),
                static_cast<long long>(bad_member), static_cast<long long>(splits["train"]),
                static_cast<long long>(splits["val"]), static_cast<long long>(splits["test"]));
  report(bad_name + bad_round_trip + bad_member == 0 && ratios, "format", buf);
}

void impartiality(const fs::path& corpus) {
  std::array<std::int64_t, kAnswerPanels> targets{};
  std::int64_t n = 0, partial = 0;
  for (const auto& path : list_instances(corpus)) {
    const InstanceRecord r = read_instance(path);
    ++n;
    ++targets[static_cast<std::size_t>(r.target)];
    partial += !impartial_counts(*r.meta->matrix);
  }
  const double chi = oracle::chi_square_uniform(targets);
  std::string hist;
  for (auto t : targets) hist += (hist.empty() ? "" : ",") + std::to_string(t);
  char buf[240];
  std::snprintf(buf, sizeof buf, "%lld/%lld instances not 4-of-8, targets [%s], chi-square %.3f < %.3f",
                static_cast<long long>(partial), static_cast<long long>(n), hist.c_str(), chi, kChiSquareCritical);
  report(n == kImpartialCorpus && partial == 0 && chi < kChiSquareCritical, "impartiality", buf);
}

}  // namespace

int main() {
  try {
    determinism();
    const fs::path corpus = fs::temp_directory_path() / "ravenforge_acceptance_det_a";
    solvability_and_encoding();
    regime_audit();
    mesh_guarantee();
    format(corpus);
    impartiality(corpus);
    fs::remove_all(corpus);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
