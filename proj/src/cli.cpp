#include "rankorder/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankorder/branch_timing.hpp"
#include "rankorder/combinatorics.hpp"
#include "rankorder/errors.hpp"
#include "rankorder/oracle.hpp"
#include "rankorder/rank_inference.hpp"
#include "rankorder/tree.hpp"

namespace rankorder::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  bool json = false;
  bool exact = false;
  int precision = 6;
  std::string file;
};

// How rationals appear in output.
class Renderer {
 public:
  explicit Renderer(const Options& opts) : opts_(opts) {}

  std::string text(const Rational& q) const {
    if (opts_.exact) return to_exact_string(q);
    return to_exact_string(q) + " (" + to_decimal_string(q, opts_.precision) + ")";
  }

  Json json(const Rational& q) const {
    Json j;
    j["exact"] = to_exact_string(q);
    if (!opts_.exact) j["decimal"] = to_decimal_string(q, opts_.precision);
    return j;
  }

 private:
  const Options& opts_;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_input(const std::string& file, std::istream& in) {
  if (file == "-") return std::string(std::istreambuf_iterator<char>(in), {});
  std::ifstream stream(file, std::ios::binary);
  if (!stream) throw UsageError("cannot read '" + file + "'");
  return std::string(std::istreambuf_iterator<char>(stream), {});
}

Json tree_digest(const PhyloTree& tree) {
  Json j;
  j["leaves"] = tree.leaf_count();
  j["interior"] = tree.interior_count();
  j["binary"] = is_binary(tree);
  return j;
}

std::string order_names(const PhyloTree& tree, const RankFunction& r) {
  std::string line;
  for (auto v : r.order) {
    if (!line.empty()) line.push_back(' ');
    line += tree.name(v);
  }
  return line;
}

Json order_json(const PhyloTree& tree, const RankFunction& r) {
  Json names = Json::array();
  for (auto v : r.order) names.push_back(tree.name(v));
  return names;
}

// Each command fills the JSON payload and the plain-text lines.
struct Output {
  Json payload = Json::object();
  std::ostringstream text;
};

void cmd_count(const PhyloTree& tree, Output& o) {
  const auto count = count_rank_functions(tree).get_str();
  o.payload["count"] = count;
  o.text << count << '\n';
}

void cmd_list_vertices(const PhyloTree& tree, Output& o) {
  o.payload["vertices"] = Json::array();
  o.text << "id\tname\tkind\tparent\tleaves\n";
  for (auto v : tree.vertices()) {
    const auto parent = tree.parent(v);
    Json row;
    row["id"] = v.index;
    row["name"] = tree.name(v);
    row["kind"] = tree.is_leaf(v) ? "leaf" : "interior";
    row["parent"] = parent ? Json(tree.name(*parent)) : Json(nullptr);
    row["leaves"] = tree.leaves_below(v);
    o.payload["vertices"].push_back(row);
    o.text << v.index << '\t' << tree.name(v) << '\t' << (tree.is_leaf(v) ? "leaf" : "interior") << '\t'
           << (parent ? tree.name(*parent) : "-") << '\t' << tree.leaves_below(v) << '\n';
  }
}

void cmd_rankprob(const PhyloTree& tree, const std::string& name, bool moments, const Renderer& r, Output& o) {
  const VertexId v = tree.vertex(name);
  const auto dist = rank_probabilities(tree, v);
  o.payload["vertex"] = tree.name(v);
  o.payload["distribution"] = Json::array();
  o.text << "rank\tprobability\n";
  for (std::size_t i = 1; i <= dist.size(); ++i) {
    Json row;
    row["rank"] = i;
    row["p"] = r.json(dist.at(i));
    o.payload["distribution"].push_back(row);
    o.text << i << '\t' << r.text(dist.at(i)) << '\n';
  }
  if (moments) {
    const auto summary = rank_moments(dist);
    o.payload["moments"]["mean"] = r.json(summary.mean);
    o.payload["moments"]["variance"] = r.json(summary.variance);
    o.text << "mean\t" << r.text(summary.mean) << '\n' << "variance\t" << r.text(summary.variance) << '\n';
  }
}

void cmd_compare(const PhyloTree& tree, const std::string& u_name, const std::string& v_name, const Renderer& r,
                 Output& o) {
  const VertexId u = tree.vertex(u_name);
  const VertexId v = tree.vertex(v_name);
  const auto p = compare(tree, u, v);
  o.payload["u"] = tree.name(u);
  o.payload["v"] = tree.name(v);
  o.payload["p"] = r.json(p);
  o.text << r.text(p) << '\n';
}

void cmd_date(const PhyloTree& tree, const std::string& model_name, bool pendant, std::size_t cap,
              const Options& opts, const Renderer& r, Output& o) {
  const TimingModel model = parse_timing_model(model_name);
  const auto report = date_tree(tree, model, pendant, cap);
  o.payload["model"] = std::string(to_string(model));
  o.payload["edges"] = Json::array();
  o.text << "parent\tchild\tkind\tlength\n";
  for (const auto& [v, length] : report.all_edges()) {
    const auto parent = *tree.parent(v);
    const char* kind = tree.is_leaf(v) ? "pendant" : "interior";
    Json row;
    row["parent"] = tree.name(parent);
    row["child"] = tree.name(v);
    row["kind"] = kind;
    row["length"] = r.json(length);
    o.payload["edges"].push_back(row);
    o.text << tree.name(parent) << '\t' << tree.name(v) << '\t' << kind << '\t' << r.text(length) << '\n';
  }
  if (pendant) {
    o.payload["leaf_depths"] = Json::object();
    o.text << "leaf\tdepth\n";
    for (const auto& [v, depth] : report.leaf_depths) {
      o.payload["leaf_depths"][tree.name(v)] = r.json(depth);
      o.text << tree.name(v) << '\t' << r.text(depth) << '\n';
    }
  }
  const auto newick = write_newick_partial(tree, report.all_edges(), opts.precision);
  o.payload["newick"] = newick;
  o.text << newick << '\n';
}

void cmd_sample(const PhyloTree& tree, std::size_t n, std::uint64_t seed, bool summary, const Renderer& r,
                Output& o) {
  Rng rng(seed);
  o.payload["seed"] = seed;
  o.payload["n"] = n;
  if (!summary) {
    o.payload["samples"] = Json::array();
    for (std::size_t k = 0; k < n; ++k) {
      const auto f = sample_rank_function(tree, rng);
      o.payload["samples"].push_back(order_json(tree, f));
      o.text << order_names(tree, f) << '\n';
    }
    return;
  }
  std::map<RankFunction, std::size_t> counts;
  for (std::size_t k = 0; k < n; ++k) ++counts[sample_rank_function(tree, rng)];
  o.payload["frequencies"] = Json::array();
  o.text << "count\tfrequency\torder\n";
  for (const auto& [f, c] : counts) {
    const auto freq = make_rational(c, n);
    Json row;
    row["order"] = order_json(tree, f);
    row["count"] = c;
    row["frequency"] = r.json(freq);
    o.payload["frequencies"].push_back(row);
    o.text << c << '\t' << r.text(freq) << '\t' << order_names(tree, f) << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Rank distributions and expected edge lengths for ranked phylogenetic trees", "rankorder"};
  app.require_subcommand(1);
  app.add_flag("--json", opts.json, "Machine-readable JSON output");
  app.add_flag("--exact", opts.exact, "Print exact rationals only");
  app.add_option("--precision", opts.precision, "Significant digits for decimals")->check(CLI::Range(1, 100));

  auto add_command = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("FILE", opts.file, "Newick file, or - for stdin")->required();
    return sub;
  };

  auto* count = add_command("count", "Number of rank functions of the tree");
  auto* list = add_command("list-vertices", "Vertex names (labels or #k preorder names)");

  std::string vertex;
  bool moments = false;
  auto* rankprob = add_command("rankprob", "Distribution of the rank of one interior vertex");
  rankprob->add_option("--vertex", vertex, "Interior vertex name")->required();
  rankprob->add_flag("--moments", moments, "Append mean and variance");

  std::string u_name;
  std::string v_name;
  auto* cmp = add_command("compare", "Probability that u ranks before v");
  cmp->add_option("--u", u_name, "First interior vertex")->required();
  cmp->add_option("--v", v_name, "Second interior vertex")->required();

  std::string model = "yule";
  bool pendant = false;
  std::size_t cap = kDefaultMaxResolutions;
  auto* date = add_command("date", "Expected edge lengths");
  date->add_option("--model", model, "yule or coalescent")->check(CLI::IsMember({"yule", "coalescent"}));
  date->add_flag("--pendant", pendant, "Include pendant edges and leaf depths (Yule only)");
  date->add_option("--max-resolutions", cap, "Cap on binary resolutions of polytomies");

  std::size_t n = 1;
  std::uint64_t seed = 0;
  bool summary = false;
  auto* sample = add_command("sample", "Uniformly random rank functions");
  sample->add_option("--n", n, "Number of samples");
  sample->add_option("--seed", seed, "64-bit seed");
  sample->add_flag("--summary", summary, "Frequency table instead of one line per sample");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    const PhyloTree tree = parse_newick(read_input(opts.file, in));
    const Renderer r(opts);
    Output o;
    if (count->parsed()) {
      cmd_count(tree, o);
    } else if (list->parsed()) {
      cmd_list_vertices(tree, o);
    } else if (rankprob->parsed()) {
      cmd_rankprob(tree, vertex, moments, r, o);
    } else if (cmp->parsed()) {
      cmd_compare(tree, u_name, v_name, r, o);
    } else if (date->parsed()) {
      cmd_date(tree, model, pendant, cap, opts, r, o);
    } else {
      cmd_sample(tree, n, seed, summary, r, o);
    }

    if (opts.json) {
      Json doc;
      doc["command"] = Json(args);
      doc["tree"] = tree_digest(tree);
      doc["payload"] = std::move(o.payload);
      doc["exact"] = opts.exact;
      doc["decimal"] = opts.exact ? Json(nullptr) : Json(opts.precision);
      out << doc.dump(2) << '\n';
    } else {
      out << o.text.str();
    }
    return kSuccess;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ResolutionLimitError& e) {
    err << "error: " << e.what() << " (raise --max-resolutions)\n";
    return kResolutionCap;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kContract;
  }
}

}  // namespace rankorder::cli
