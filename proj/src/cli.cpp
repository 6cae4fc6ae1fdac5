#include "qplane/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qplane/census.hpp"
#include "qplane/field.hpp"
#include "qplane/flats.hpp"
#include "qplane/motions.hpp"
#include "qplane/plane.hpp"
#include "qplane/simplex.hpp"

namespace qplane {

namespace {

constexpr const char* kFormatVersion = "qplane-report/1";

Point parse_point(const std::string& text, PrimeModulus m) {
  std::vector<FieldElement> coords;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      unsigned long long v = std::stoull(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      coords.emplace_back(v, m);
    } catch (const std::exception&) {
      throw BadSpec("bad point coordinate '" + tok + "'");
    }
  }
  if (coords.empty()) throw BadSpec("empty point '" + text + "'");
  return Point(std::move(coords));
}

std::vector<FieldElement> parse_values(const std::string& text, PrimeModulus m) {
  std::vector<FieldElement> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      unsigned long long v = std::stoull(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      vals.emplace_back(v, m);
    } catch (const std::exception&) {
      throw BadSpec("bad value '" + tok + "'");
    }
  }
  return vals;
}

nlohmann::json point_json(const Point& p) {
  nlohmann::json j = nlohmann::json::array();
  for (size_t i = 0; i < p.dim(); ++i) j.push_back(p[i].value());
  return j;
}

std::string csv_escape(const nlohmann::json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find(',') != std::string::npos || s.find('"') != std::string::npos) {
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      quoted += '"';
      return quoted;
    }
    return s;
  }
  return v.dump();
}

std::string csv_of_object(const nlohmann::json& obj) {
  std::string header, row;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += it.key();
    row += csv_escape(it.value());
  }
  return header + "\n" + row + "\n";
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qplane: an exact-arithmetic laboratory for plane geometry over F_q"};
  app.set_help_flag("--help", "print help");  // frees -h/--h for the middle dimension
  app.require_subcommand(1);

  // shared flags
  uint32_t q = 7;
  int dim = 2, k = 1, h = -1, n = 2, d_simplex = 2;
  uint64_t seed = 0;
  std::string set_spec = "all";
  uint32_t ell_value = 1;
  std::string lengths, lengths_file, point_a, point_x, point_y;
  std::string seg_x1, seg_y1, seg_x2, seg_y2, anchor_text;
  uint32_t value_a = 0;
  uint32_t l2_value = 1, l3_value = 1;
  bool include_degenerate = false;
  int trials = 100;
  double threshold = 2.0;
  uint32_t p_max = 100;
  std::string format = "json";
  std::string out_path;

  app.add_option("--format", format, "output format: json or csv (csv for census tables only)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "write the record to a file instead of standard output");

  std::string command;
  std::function<void(nlohmann::json&, std::vector<std::string>&)> action;
  nlohmann::json params;

  auto add_q = [&](CLI::App* cmd) { cmd->add_option("--q", q, "odd prime modulus")->required(); };

  // ---- field ----------------------------------------------------------
  auto* field_cmd = app.add_subcommand("field", "prime field arithmetic queries");
  {
    auto* leg = field_cmd->add_subcommand("legendre", "legendre symbol of a");
    add_q(leg);
    leg->add_option("--a", value_a, "element")->required();
    leg->callback([&] {
      command = "field legendre";
      params = {{"q", q}, {"a", value_a}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        payload = {{"a", value_a % q}, {"legendre", legendre(FieldElement(value_a, m))}};
      };
    });
    auto* sq = field_cmd->add_subcommand("sqrt", "square roots of a, if any");
    add_q(sq);
    sq->add_option("--a", value_a, "element")->required();
    sq->callback([&] {
      command = "field sqrt";
      params = {{"q", q}, {"a", value_a}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        auto r = sqrt(FieldElement(value_a, m));
        payload = {{"a", value_a % q}, {"exists", r.has_value()}};
        if (r) {
          payload["root"] = r->root.value();
          payload["minus_root"] = r->minus_root.value();
        }
      };
    });
    auto* ts = field_cmd->add_subcommand("two-squares", "write a as x^2 + y^2");
    add_q(ts);
    ts->add_option("--a", value_a, "element")->required();
    ts->callback([&] {
      command = "field two-squares";
      params = {{"q", q}, {"a", value_a}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        auto [x, y] = sum_of_two_squares(FieldElement(value_a, m));
        payload = {{"a", value_a % q}, {"x", x.value()}, {"y", y.value()}};
      };
    });
    auto* qs = field_cmd->add_subcommand("quad-sqrt", "square root of a in F_{q^2}");
    add_q(qs);
    qs->add_option("--a", value_a, "element")->required();
    qs->callback([&] {
      command = "field quad-sqrt";
      params = {{"q", q}, {"a", value_a}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        auto z = quad_ext_sqrt(FieldElement(value_a, m));
        payload = {{"a", value_a % q},
                   {"nonresidue", z.nonresidue()},
                   {"base", z.base().value()},
                   {"ext", z.ext().value()},
                   {"in_base_field", z.in_base_field()},
                   {"str", z.str()}};
      };
    });
  }

  // ---- so2 ------------------------------------------------------------
  auto* so2_cmd = app.add_subcommand("so2", "the finite rotation group");
  {
    auto* cen = so2_cmd->add_subcommand("census", "order of SO(2,q) against the closed form");
    add_q(cen);
    cen->callback([&] {
      command = "so2 census";
      params = {{"q", q}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        uint64_t order = enumerate_so2(m).size();
        uint64_t expected = q % 4 == 3 ? q + 1 : q - 1;
        payload = {{"order", order}, {"expected", expected}};
      };
    });
    auto* list = so2_cmd->add_subcommand("list", "all rotations (a, b)");
    add_q(list);
    list->callback([&] {
      command = "so2 list";
      params = {{"q", q}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        nlohmann::json rots = nlohmann::json::array();
        for (const Rotation& r : enumerate_so2(m)) {
          rots.push_back({r.a().value(), r.b().value()});
        }
        payload = {{"order", rots.size()}, {"rotations", rots}};
      };
    });
  }

  // ---- screw ----------------------------------------------------------
  auto* screw_cmd = app.add_subcommand("screw", "the motion <-> point correspondence in F_q^3");
  {
    auto* line = screw_cmd->add_subcommand("line", "the line of screw points mapping x to y");
    add_q(line);
    line->add_option("--x", point_x, "source point a,b")->required();
    line->add_option("--y", point_y, "target point a,b")->required();
    line->callback([&] {
      command = "screw line";
      params = {{"q", q}, {"x", point_x}, {"y", point_y}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        PairLine l = pair_line(parse_point(point_x, m), parse_point(point_y, m));
        nlohmann::json pts = nlohmann::json::array();
        for (const ScrewPoint& s : l.points()) {
          pts.push_back({s.center()[0].value(), s.center()[1].value(), s.r().value()});
        }
        payload = {{"base", {l.base()[0].value(), l.base()[1].value(), l.base()[2].value()}},
                   {"dir", {l.dir()[0].value(), l.dir()[1].value(), l.dir()[2].value()}},
                   {"points", pts}};
      };
    });
    auto* between = screw_cmd->add_subcommand("between", "unique screw point mapping one segment to another");
    add_q(between);
    between->add_option("--x1", seg_x1)->required();
    between->add_option("--y1", seg_y1)->required();
    between->add_option("--x2", seg_x2)->required();
    between->add_option("--y2", seg_y2)->required();
    between->callback([&] {
      command = "screw between";
      params = {{"q", q}, {"x1", seg_x1}, {"y1", seg_y1}, {"x2", seg_x2}, {"y2", seg_y2}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        Point x1 = parse_point(seg_x1, m), y1 = parse_point(seg_y1, m);
        Point x2 = parse_point(seg_x2, m), y2 = parse_point(seg_y2, m);
        ScrewPoint s = motion_between_segments(x1, y1, x2, y2);
        payload = {{"center", {s.center()[0].value(), s.center()[1].value()}},
                   {"r", s.r().value()},
                   {"verified", s.apply(x1) == x2 && s.apply(y1) == y2}};
      };
    });
    auto* audit = screw_cmd->add_subcommand("audit", "pair-line family partition audit");
    add_q(audit);
    audit->callback([&] {
      command = "screw audit";
      params = {{"q", q}};
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        auto rep = line_family_audit(PrimeModulus(q));
        payload = rep;
        violations.insert(violations.end(), rep.violations.begin(), rep.violations.end());
      };
    });
  }

  // ---- flats ----------------------------------------------------------
  auto* flats_cmd = app.add_subcommand("flats", "affine subspace counting");
  {
    auto* count = flats_cmd->add_subcommand("count", "closed-form flat counts");
    add_q(count);
    count->add_option("--d", dim, "ambient dimension")->required();
    count->add_option("--k", k, "flat dimension")->required();
    count->add_option("--h", h, "middle dimension for the multiplicity count");
    count->callback([&] {
      command = "flats count";
      params = {{"q", q}, {"d", dim}, {"k", k}};
      if (h >= 0) params["h"] = h;
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        payload = {{"flat_count", flat_count(dim, k, m)}};
        if (k < dim) {
          auto tc = through_counts(dim, k, m);
          payload["flats_through_point"] = tc.flats_through_point;
          payload["superflats_through_flat"] = tc.superflats_through_flat;
        }
        if (h >= 0) payload["flats_through_flat"] = flats_through_flat(dim, h, k, m);
      };
    });
    auto* enumerate = flats_cmd->add_subcommand("enumerate", "all k-flats in canonical form");
    add_q(enumerate);
    enumerate->add_option("--d", dim)->required();
    enumerate->add_option("--k", k)->required();
    enumerate->callback([&] {
      command = "flats enumerate";
      params = {{"q", q}, {"d", dim}, {"k", k}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        auto flats = enumerate_flats(m, dim, k);
        nlohmann::json rows = nlohmann::json::array();
        for (const Flat& f : flats) rows.push_back(f.str());
        payload = {{"count", flats.size()}, {"flats", rows}};
      };
    });
  }

  // ---- incidence ------------------------------------------------------
  auto* inc_cmd = app.add_subcommand("incidence", "point-flat incidence counting");
  {
    auto* full = inc_cmd->add_subcommand("full", "all flats against all points");
    add_q(full);
    full->add_option("--d", dim)->required();
    full->add_option("--k", k)->required();
    full->add_option("--threshold", threshold, "audit constant on the error term");
    full->callback([&] {
      command = "incidence full";
      params = {{"q", q}, {"d", dim}, {"k", k}, {"threshold", threshold}};
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        PrimeModulus m(q);
        auto flats = enumerate_flats(m, dim, k);
        auto pts = generate("all", m, dim, 0).points();
        auto rep = count_incidences(flats, pts);
        payload = rep;
        if (rep.slack > threshold) {
          violations.push_back("slack " + std::to_string(rep.slack) + " exceeds the audit constant");
        }
      };
    });
    auto* rnd = inc_cmd->add_subcommand("random", "seeded random subfamily audit");
    add_q(rnd);
    rnd->add_option("--d", dim)->required();
    rnd->add_option("--k", k)->required();
    rnd->add_option("--trials", trials);
    rnd->add_option("--seed", seed);
    rnd->add_option("--threshold", threshold, "audit constant on the error term");
    rnd->callback([&] {
      command = "incidence random";
      params = {{"q", q}, {"d", dim}, {"k", k}, {"trials", trials}, {"seed", seed},
                {"threshold", threshold}};
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        PrimeModulus m(q);
        auto flats = enumerate_flats(m, dim, k);
        auto pts = generate("all", m, dim, 0).points();
        std::mt19937_64 rng(seed);
        double max_slack = -1e300;
        for (int t = 0; t < trials; ++t) {
          std::vector<Flat> sub_flats;
          std::vector<Point> sub_pts;
          for (const auto& f : flats) {
            if (rng() & 1) sub_flats.push_back(f);
          }
          for (const auto& x : pts) {
            if (rng() & 1) sub_pts.push_back(x);
          }
          auto rep = count_incidences(sub_flats, sub_pts);
          max_slack = std::max(max_slack, rep.slack);
          if (rep.slack > threshold) {
            violations.push_back("trial " + std::to_string(t) + ": slack " +
                                 std::to_string(rep.slack));
          }
        }
        payload = {{"trials", trials}, {"max_slack", max_slack}, {"threshold", threshold}};
      };
    });
    auto* dc = inc_cmd->add_subcommand("double-count", "per-enclosing-flat incidence identity");
    add_q(dc);
    dc->add_option("--d", dim)->required();
    dc->add_option("--k", k)->required();
    dc->callback([&] {
      command = "incidence double-count";
      params = {{"q", q}, {"d", dim}, {"k", k}};
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        PrimeModulus m(q);
        auto flats = enumerate_flats(m, dim, k);
        auto pts = generate("all", m, dim, 0).points();
        auto rep = count_incidences(flats, pts);
        uint64_t sum = enclosing_incidence_sum(flats, pts);
        uint64_t multiplier = flats_through_flat(dim, k + 1, k, m);
        bool holds = sum == rep.incidences * multiplier;
        payload = {{"incidences", rep.incidences},
                   {"multiplier", multiplier},
                   {"enclosing_sum", sum},
                   {"identity_holds", holds}};
        if (!holds) violations.push_back("double-counting identity failed");
      };
    });
  }

  // ---- triangle -------------------------------------------------------
  auto* tri_cmd = app.add_subcommand("triangle", "triangles with prescribed side lengths");
  {
    auto* exists = tri_cmd->add_subcommand("exists", "existence by the discriminant criterion");
    add_q(exists);
    exists->add_option("--lengths", lengths, "l1,l2,l3")->required();
    exists->callback([&] {
      command = "triangle exists";
      params = {{"q", q}, {"lengths", lengths}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        auto vals = parse_values(lengths, m);
        if (vals.size() != 3) throw BadSpec("--lengths needs exactly three values");
        auto res = triangle_exists(LengthTriple(vals[0], vals[1], vals[2]));
        payload = {{"exists", res.exists},
                   {"discriminant", res.discriminant.value()},
                   {"legendre", res.disc_legendre}};
        if (res.witness) {
          nlohmann::json w = nlohmann::json::array();
          for (const auto& v : *res.witness) w.push_back(point_json(v));
          payload["witness"] = w;
        } else {
          payload["reason"] = std::to_string(res.discriminant.value()) + " nonsquare mod " +
                              std::to_string(q);
        }
      };
    });
    auto* extend = tri_cmd->add_subcommand("extend", "apexes over a base segment");
    add_q(extend);
    extend->add_option("--x1", seg_x1)->required();
    extend->add_option("--x2", seg_x2)->required();
    extend->add_option("--l2", l2_value)->required();
    extend->add_option("--l3", l3_value)->required();
    extend->callback([&] {
      command = "triangle extend";
      params = {{"q", q}, {"x1", seg_x1}, {"x2", seg_x2}, {"l2", l2_value}, {"l3", l3_value}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        auto apexes = extend_segment(parse_point(seg_x1, m), parse_point(seg_x2, m),
                                     FieldElement(l2_value, m), FieldElement(l3_value, m));
        nlohmann::json pts = nlohmann::json::array();
        for (const Point& x : apexes) pts.push_back(point_json(x));
        payload = {{"count", apexes.size()}, {"points", pts}};
      };
    });
  }

  // ---- simplex --------------------------------------------------------
  auto* simplex_cmd = app.add_subcommand("simplex", "higher-dimensional configurations");
  {
    auto* eq = simplex_cmd->add_subcommand("equilateral", "equilateral d-simplex existence");
    add_q(eq);
    eq->add_option("--d", d_simplex)->required();
    eq->add_option("--ell", ell_value)->required();
    eq->callback([&] {
      command = "simplex equilateral";
      params = {{"q", q}, {"d", d_simplex}, {"ell", ell_value}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        payload = equilateral_simplex(d_simplex, FieldElement(ell_value, m));
      };
    });
    auto* gram = simplex_cmd->add_subcommand("gram", "factor a length table");
    add_q(gram);
    gram->add_option("--lengths-file", lengths_file, "JSON (d+1)x(d+1) squared-length table")
        ->required();
    gram->callback([&] {
      command = "simplex gram";
      params = {{"q", q}, {"lengths-file", lengths_file}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        std::ifstream f(lengths_file);
        if (!f) throw BadSpec("cannot open " + lengths_file);
        nlohmann::json table = nlohmann::json::parse(f, nullptr, false);
        if (table.is_discarded() || !table.is_array()) {
          throw BadSpec("length table must be a JSON array of arrays");
        }
        std::vector<std::vector<FieldElement>> rows;
        for (const auto& row : table) {
          if (!row.is_array()) throw BadSpec("length table must be a JSON array of arrays");
          std::vector<FieldElement> r;
          for (const auto& v : row) {
            if (!v.is_number_unsigned()) throw BadSpec("length entries must be decimal residues");
            r.emplace_back(v.get<uint64_t>(), m);
          }
          rows.push_back(std::move(r));
        }
        if (rows.size() < 2) throw BadSpec("length table needs at least two rows");
        LengthMatrix b = length_matrix(static_cast<int>(rows.size()) - 1, rows);
        auto res = gram_decompose(b);
        payload = {{"matrix", b}, {"det", determinant(b).value()}, {"gram", res}};
      };
    });
  }

  // ---- census ---------------------------------------------------------
  auto* census_cmd = app.add_subcommand("census", "configuration class censuses");
  {
    auto* tri = census_cmd->add_subcommand("triangles", "congruence classes attained by a set");
    add_q(tri);
    tri->add_option("--set", set_spec);
    tri->add_option("--seed", seed);
    tri->add_flag("--include-degenerate", include_degenerate);
    tri->callback([&] {
      command = "census triangles";
      params = {{"q", q}, {"set", set_spec}, {"seed", seed},
                {"include_degenerate", include_degenerate}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        PrimeModulus m(q);
        PointSet e = generate(set_spec, m, 2, seed);
        payload = congruence_census(e, include_degenerate);
      };
    });
    auto* trans = census_cmd->add_subcommand("translation", "translation-class coverage");
    add_q(trans);
    trans->add_option("--d", dim);
    trans->add_option("--n", n);
    trans->add_option("--set", set_spec);
    trans->add_option("--seed", seed);
    trans->callback([&] {
      command = "census translation";
      params = {{"q", q}, {"d", dim}, {"n", n}, {"set", set_spec}, {"seed", seed}};
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        PrimeModulus m(q);
        PointSet e = generate(set_spec, m, dim, seed);
        auto rep = translation_coverage(e, n);
        payload = rep;
        if (!rep.lower_bound_holds) {
          violations.push_back("size lower bound violated: |E| < fraction^{1/n} q^{d(1-1/n)}");
        }
      };
    });
  }

  // ---- audit ----------------------------------------------------------
  auto* audit_cmd = app.add_subcommand("audit", "distance-pair and motion-set audits");
  {
    auto* pairs = audit_cmd->add_subcommand("pairs", "distance-pair count against its prediction");
    add_q(pairs);
    pairs->add_option("--set", set_spec);
    pairs->add_option("--seed", seed);
    pairs->add_option("--ell", ell_value)->required();
    pairs->callback([&] {
      command = "audit pairs";
      params = {{"q", q}, {"set", set_spec}, {"seed", seed}, {"ell", ell_value}};
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        PrimeModulus m(q);
        PointSet e = generate(set_spec, m, 2, seed);
        auto rep = count_distance_pairs(e, FieldElement(ell_value, m));
        payload = rep;
        if (!rep.residual_within) {
          violations.push_back("residual " + std::to_string(rep.residual) +
                               " exceeds sqrt(q)|E| = " + std::to_string(rep.residual_bound));
        }
      };
    });
    auto* es = audit_cmd->add_subcommand("elekes-sharir", "motion-set reach audit");
    add_q(es);
    es->add_option("--set", set_spec);
    es->add_option("--seed", seed);
    es->add_option("--ell", ell_value)->required();
    es->add_option("--anchor", anchor_text, "anchor pair 'a,b:c,d' (default: first pair)");
    es->callback([&] {
      command = "audit elekes-sharir";
      params = {{"q", q}, {"set", set_spec}, {"seed", seed}, {"ell", ell_value}};
      if (!anchor_text.empty()) params["anchor"] = anchor_text;
      action = [&](nlohmann::json& payload, std::vector<std::string>& violations) {
        PrimeModulus m(q);
        PointSet e = generate(set_spec, m, 2, seed);
        std::optional<std::pair<Point, Point>> anchor;
        if (!anchor_text.empty()) {
          auto colon = anchor_text.find(':');
          if (colon == std::string::npos) throw BadSpec("--anchor expects 'a,b:c,d'");
          anchor = {parse_point(anchor_text.substr(0, colon), m),
                    parse_point(anchor_text.substr(colon + 1), m)};
        }
        auto rep = elekes_sharir_audit(e, FieldElement(ell_value, m), anchor);
        payload = rep;
        if (rep.missed_count >= static_cast<uint64_t>(q) * q) {
          violations.push_back("the motion set reaches no point: |Y| = q^2");
        }
      };
    });
  }

  // ---- table ----------------------------------------------------------
  auto* table_cmd = app.add_subcommand("table", "per-prime summary tables");
  {
    auto* eq = table_cmd->add_subcommand("equilateral", "equilateral triangle existence by prime");
    eq->add_option("--p-max", p_max, "upper bound on the primes (exclusive, <= 1000)");
    eq->callback([&] {
      command = "table equilateral";
      params = {{"p_max", p_max}};
      action = [&](nlohmann::json& payload, std::vector<std::string>&) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : equilateral_triangle_table(p_max)) rows.push_back(row);
        payload = {{"rows", rows}};
      };
    });
  }

  // ---- parse and run --------------------------------------------------
  // --format/--out live on the root; let leaves hand unmatched flags upward
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
    cmd->fallthrough(true);
    for (CLI::App* sub : cmd->get_subcommands({})) enable_fallthrough(sub);
  };
  for (CLI::App* sub : app.get_subcommands({})) enable_fallthrough(sub);

  std::vector<const char*> argv;
  argv.push_back("qplane");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << std::flush;
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  if (!action) {
    err << "usage error: missing subcommand\n";
    return 2;
  }

  nlohmann::json payload;
  std::vector<std::string> violations;
  const auto start = std::chrono::steady_clock::now();
  try {
    action(payload, violations);
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::string rendered;
  if (format == "csv") {
    if (command == "census triangles" || command == "census translation") {
      rendered = csv_of_object(payload);
    } else if (command == "table equilateral") {
      std::string text;
      bool first = true;
      for (const auto& row : payload["rows"]) {
        std::string csv = csv_of_object(row);
        if (first) {
          text += csv;
          first = false;
        } else {
          text += csv.substr(csv.find('\n') + 1);
        }
      }
      rendered = text;
    } else {
      err << "usage error: csv output is provided for the census tables only\n";
      return 2;
    }
  } else {
    nlohmann::json record{{"format_version", kFormatVersion},
                          {"command", command},
                          {"parameters", params},
                          {"seed", seed},
                          {"payload", payload},
                          {"violations", violations},
                          {"elapsed_ms", elapsed}};
    rendered = record.dump(2) + "\n";
  }

  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      err << "cannot write " << out_path << "\n";
      return 2;
    }
    f << rendered;
  } else {
    out << rendered;
  }
  return violations.empty() ? 0 : 1;
}

}  // namespace qplane
