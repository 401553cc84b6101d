// warpqi: quantify and visualize area distortion in 2D projections.
//
// Subcommands: synth, project, metrics, render. Exit codes: 0 success,
// 1 runtime/data error, 2 usage error. Every output file gets a sibling
// "<path>.manifest.json" recording the command line, seeds, and input
// digests so runs can be audited and reproduced byte-for-byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "warpqi/data.hpp"
#include "warpqi/metrics.hpp"
#include "warpqi/projectors.hpp"
#include "warpqi/render.hpp"
#include "warpqi/version.hpp"

namespace {

using nlohmann::json;

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) warpqi::raise(warpqi::errc::file_not_found, "cannot open: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char out[32];
  std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) warpqi::raise(warpqi::errc::file_not_found, "cannot write: " + path);
  out << content;
}

struct ManifestInputs {
  std::vector<std::string> paths;
};

void write_manifest(const std::string& output_path,
                    const std::vector<std::string>& argv_echo,
                    const ManifestInputs& inputs, json config) {
  json inputs_json = json::object();
  for (const auto& p : inputs.paths) inputs_json[p] = fnv1a64_file(p);
  const json doc{
      {"tool", "warpqi"},
      {"version", warpqi::kVersion},
      {"command", argv_echo},
      {"inputs", inputs_json},
      {"output", {{"path", output_path}, {"digest", fnv1a64_file(output_path)}}},
      {"config", std::move(config)},
  };
  write_file(output_path + ".manifest.json", doc.dump(2) + "\n");
}

warpqi::DistanceProvider load_hd_side(const std::string& points_path,
                                      const std::string& dist_path) {
  if (!dist_path.empty()) {
    return warpqi::load_distance_matrix(dist_path);
  }
  return warpqi::DistanceProvider::from_points(
      warpqi::load_points_csv(points_path));
}

void warn_diagnostics(const warpqi::WarpingResult& wr) {
  if (!wr.triangulation.coalesced.empty()) {
    std::cerr << "warning: coalesced " << wr.triangulation.coalesced.size()
              << " duplicate layout point(s) onto their first occurrence\n";
  }
  if (wr.metric_violations > 0) {
    std::cerr << "warning: " << wr.metric_violations
              << " triangle(s) violated the triangle inequality; their "
                 "areas were clamped to 0\n";
  }
}

std::string points_csv_string(const warpqi::PointSet& ps) {
  std::string out;
  char buf[64];
  for (int i = 0; i < ps.n(); ++i) {
    for (int j = 0; j < ps.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ps.points(i, j));
      out += buf;
      out += (j + 1 == ps.dim()) ? '\n' : ',';
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> argv_echo(argv, argv + argc);

  CLI::App app{"Warping Index: projection distortion metrics and maps"};
  app.set_version_flag("--version", warpqi::kVersion);
  app.require_subcommand(1);
  std::function<void()> run;

  // ---- synth ----------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->require_subcommand(1);
  auto* square = synth->add_subcommand(
      "square", "uniform plane with low-amplitude noise in the 3rd axis");
  struct SynthOpts {
    int n = 3000;
    double noise = 0.001;
    std::uint64_t seed = 0;
    std::string out;
  };
  {
    auto opts = std::make_shared<SynthOpts>();
    square->add_option("--n", opts->n, "number of points")
        ->check(CLI::Range(3, 1000000000));
    square->add_option("--noise", opts->noise, "third-axis amplitude")
        ->check(CLI::NonNegativeNumber);
    square->add_option("--seed", opts->seed, "RNG seed");
    square->add_option("-o,--output", opts->out, "points CSV path")->required();
    square->callback([&run, opts, &argv_echo] {
      run = [opts, &argv_echo] {
        const warpqi::PointSet ps =
            warpqi::generate_square(opts->n, opts->noise, opts->seed);
        write_file(opts->out, points_csv_string(ps));
        write_manifest(opts->out, argv_echo, {},
                       json{{"n", opts->n},
                            {"noise", opts->noise},
                            {"seed", opts->seed},
                            {"rng", "mt19937_64/53-bit"}});
      };
    });
  }

  // ---- project --------------------------------------------------------
  auto* project = app.add_subcommand("project", "project points to 2D");
  project->require_subcommand(1);

  auto* pca = project->add_subcommand("pca", "principal component projection");
  struct PcaOpts {
    std::string in, out;
  };
  {
    auto opts = std::make_shared<PcaOpts>();
    pca->add_option("-i,--input", opts->in, "points CSV")->required();
    pca->add_option("-o,--output", opts->out, "layout CSV path")->required();
    pca->callback([&run, opts, &argv_echo] {
      run = [opts, &argv_echo] {
        const warpqi::PointSet ps = warpqi::load_points_csv(opts->in);
        const warpqi::PcaResult res = warpqi::pca_project(ps, 2);
        if (res.degenerate) {
          std::cerr << "warning: covariance rank below 2; trailing "
                       "component(s) carry zero variance\n";
        }
        warpqi::save_layout_csv(res.layout, opts->out);
        write_manifest(opts->out, argv_echo, {{opts->in}},
                       json{{"method", "pca"}, {"out_dims", 2}});
      };
    });
  }

  auto* tsne = project->add_subcommand("tsne", "exact t-SNE projection");
  struct TsneOpts {
    std::string in, dist, out;
    warpqi::TsneConfig cfg;
  };
  {
    auto opts = std::make_shared<TsneOpts>();
    tsne->add_option("-i,--input", opts->in, "points CSV");
    tsne->add_option("-d,--distances", opts->dist, "distance matrix CSV");
    tsne->add_option("-o,--output", opts->out, "layout CSV path")->required();
    tsne->add_option("--perplexity", opts->cfg.perplexity, "perplexity")
        ->check(CLI::PositiveNumber);
    tsne->add_option("--iterations", opts->cfg.iterations, "optimizer steps")
        ->check(CLI::Range(1, 100000));
    tsne->add_option("--learning-rate", opts->cfg.learning_rate,
                     "gradient step size")
        ->check(CLI::PositiveNumber);
    tsne->add_option("--seed", opts->cfg.seed, "RNG seed");
    tsne->callback([&run, opts, &argv_echo] {
      run = [opts, &argv_echo] {
        if (opts->in.empty() == opts->dist.empty()) {
          throw CLI::ValidationError(
              "project tsne", "exactly one of --input/--distances is required");
        }
        ManifestInputs inputs;
        warpqi::TsneResult res;
        if (!opts->in.empty()) {
          inputs.paths.push_back(opts->in);
          res = warpqi::tsne_project(warpqi::load_points_csv(opts->in),
                                     opts->cfg);
        } else {
          inputs.paths.push_back(opts->dist);
          res = warpqi::tsne_project(warpqi::load_distance_matrix(opts->dist),
                                     opts->cfg);
        }
        if (res.calibration_clamped > 0) {
          std::cerr << "warning: perplexity calibration clamped on "
                    << res.calibration_clamped << " row(s)\n";
        }
        warpqi::save_layout_csv(res.layout, opts->out);
        write_manifest(opts->out, argv_echo, inputs,
                       json{{"method", "tsne"},
                            {"perplexity", opts->cfg.perplexity},
                            {"iterations", opts->cfg.iterations},
                            {"learning_rate", opts->cfg.learning_rate},
                            {"early_exaggeration", opts->cfg.early_exaggeration},
                            {"seed", opts->cfg.seed},
                            {"rng", "mt19937_64/53-bit"}});
      };
    });
  }

  // ---- metrics --------------------------------------------------------
  auto* metrics = app.add_subcommand(
      "metrics", "evaluate warping index, stress, and trustworthiness");
  struct MetricsOpts {
    std::string points, dist, layout, out;
    int k = 5;
    bool strict = false;
    bool per_triangle = false;
    bool table = false;
  };
  {
    auto opts = std::make_shared<MetricsOpts>();
    metrics->add_option("-i,--input", opts->points, "points CSV");
    metrics->add_option("-d,--distances", opts->dist, "distance matrix CSV");
    metrics->add_option("-l,--layout", opts->layout, "layout CSV")->required();
    metrics->add_option("--k", opts->k, "trustworthiness neighborhood size")
        ->check(CLI::PositiveNumber);
    metrics->add_flag("--strict-metric", opts->strict,
                      "fail on triangle-inequality violations");
    metrics->add_flag("--per-triangle", opts->per_triangle,
                      "embed the per-triangle quality map in the report");
    metrics->add_flag("--table", opts->table, "print a human-readable table");
    metrics->add_option("-o,--output", opts->out,
                        "report path (default: stdout)");
    metrics->callback([&run, opts, &argv_echo] {
      run = [opts, &argv_echo] {
        if (opts->points.empty() == opts->dist.empty()) {
          throw CLI::ValidationError(
              "metrics", "exactly one of --input/--distances is required");
        }
        const warpqi::DistanceProvider hd =
            load_hd_side(opts->points, opts->dist);
        const warpqi::Layout layout = warpqi::load_layout_csv(opts->layout);
        const warpqi::MetricsOptions mopts{opts->k, opts->strict};

        const warpqi::WarpingResult wr =
            warpqi::warping_index(layout, hd, opts->strict);
        warn_diagnostics(wr);
        warpqi::MetricsReport report;
        report.warping_index = wr.warping_index;
        report.stress = warpqi::normalized_stress(hd, layout);
        report.trustworthiness = warpqi::trustworthiness(hd, layout, mopts.k);
        report.k_neighbors = mopts.k;
        report.n_points = layout.n();
        report.n_triangles =
            static_cast<int>(wr.triangulation.triangles.size());
        report.degenerate_triangle_count = wr.degenerate_triangle_count;

        if (opts->table) {
          std::printf("%-12s %-10s %-15s\n", "Stress", "Trust.",
                      "Warping Index");
          std::printf("%-12.4f %-10.4f %-15.4f\n", report.stress,
                      report.trustworthiness, report.warping_index);
        }
        const std::string doc = warpqi::metrics_report_json(
            report, opts->per_triangle ? &wr.quality : nullptr,
            opts->per_triangle ? &wr.triangulation : nullptr);
        if (opts->out.empty()) {
          if (!opts->table) std::fputs(doc.c_str(), stdout);
        } else {
          write_file(opts->out, doc);
          ManifestInputs inputs;
          if (!opts->points.empty()) inputs.paths.push_back(opts->points);
          if (!opts->dist.empty()) inputs.paths.push_back(opts->dist);
          inputs.paths.push_back(opts->layout);
          write_manifest(opts->out, argv_echo, inputs,
                         json{{"k", opts->k},
                              {"strict_metric", opts->strict},
                              {"per_triangle", opts->per_triangle}});
        }
      };
    });
  }

  // ---- render ---------------------------------------------------------
  auto* render = app.add_subcommand(
      "render", "draw the quality-colored triangulation as SVG");
  struct RenderOpts {
    std::string points, dist, layout, out;
    warpqi::RenderSpec spec;
    bool no_edges = false, no_points = false, no_colorbar = false;
    bool strict = false;
  };
  {
    auto opts = std::make_shared<RenderOpts>();
    render->add_option("-i,--input", opts->points, "points CSV");
    render->add_option("-d,--distances", opts->dist, "distance matrix CSV");
    render->add_option("-l,--layout", opts->layout, "layout CSV")->required();
    render->add_option("-o,--output", opts->out, "SVG path")->required();
    render->add_option("--width", opts->spec.width)->check(CLI::PositiveNumber);
    render->add_option("--height", opts->spec.height)
        ->check(CLI::PositiveNumber);
    render->add_option("--margin", opts->spec.margin)
        ->check(CLI::NonNegativeNumber);
    render->add_option("--point-radius", opts->spec.point_radius)
        ->check(CLI::PositiveNumber);
    render->add_flag("--no-edges", opts->no_edges, "skip triangle edges");
    render->add_flag("--no-points", opts->no_points, "skip point markers");
    render->add_flag("--no-colorbar", opts->no_colorbar, "skip the color bar");
    render->add_flag("--strict-metric", opts->strict,
                     "fail on triangle-inequality violations");
    render->callback([&run, opts, &argv_echo] {
      run = [opts, &argv_echo] {
        if (opts->points.empty() == opts->dist.empty()) {
          throw CLI::ValidationError(
              "render", "exactly one of --input/--distances is required");
        }
        const warpqi::DistanceProvider hd =
            load_hd_side(opts->points, opts->dist);
        const warpqi::Layout layout = warpqi::load_layout_csv(opts->layout);
        const warpqi::WarpingResult wr =
            warpqi::warping_index(layout, hd, opts->strict);
        warn_diagnostics(wr);
        opts->spec.draw_edges = !opts->no_edges;
        opts->spec.draw_points = !opts->no_points;
        opts->spec.colorbar = !opts->no_colorbar;
        const std::string svg = warpqi::render_quality_svg(
            layout, wr.triangulation, wr.quality, opts->spec);
        write_file(opts->out, svg);
        ManifestInputs inputs;
        if (!opts->points.empty()) inputs.paths.push_back(opts->points);
        if (!opts->dist.empty()) inputs.paths.push_back(opts->dist);
        inputs.paths.push_back(opts->layout);
        write_manifest(opts->out, argv_echo, inputs,
                       json{{"width", opts->spec.width},
                            {"height", opts->spec.height},
                            {"margin", opts->spec.margin},
                            {"warping_index", wr.warping_index}});
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    run();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const warpqi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
