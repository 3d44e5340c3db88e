#include <CLI11.hpp>

#include <iostream>

#include "minspace/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Boundedness and essential-norm functionals for composition operators "
      "on the minimal Mobius-invariant space"};
  app.require_subcommand(1);

  minspace::RunConfig cfg;
  double alpha_re = 0.5, alpha_im = 0.0;
  double xi_re = 1.0, xi_im = 0.0;
  std::string format = "csv";

  const auto add_common = [&](CLI::App* sub, bool needs_symbol) {
    auto* sopt = sub->add_option("--symbol", cfg.symbol_path,
                                 "symbol spec file (JSON)");
    if (needs_symbol) sopt->required();
    sub->add_option("--out", cfg.output_path, "output table path")->required();
    sub->add_option("--format", format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--rel-tol", cfg.quad.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs-tol", cfg.quad.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--max-panels", cfg.quad.max_panels, "quadrature panel budget");
    sub->add_option("--schedule-depth", cfg.schedule_depth,
                    "essnorm: largest k in s_k = 1 - 2^-k; ntprofile: largest "
                    "power of ten in the m schedule");
    sub->add_option("--seed", cfg.seed, "Monte Carlo seed (mc-check)");
    return sub;
  };

  add_common(app.add_subcommand("kappa", "kappa at one alpha"), true)
      ->add_option("--alpha-re", alpha_re, "Re alpha");
  app.get_subcommand("kappa")->add_option("--alpha-im", alpha_im, "Im alpha");

  add_common(app.add_subcommand("sweep", "kappa over a polar alpha grid"), true)
      ->add_option("--angles", cfg.angles, "alpha angles per radius");

  add_common(app.add_subcommand("essnorm", "essential norm proxy"), true)
      ->add_option("--angles", cfg.angles, "circle samples per schedule level");

  add_common(app.add_subcommand("blaschke-check",
                                "change-of-variables identity discrepancy"),
             true);

  add_common(app.add_subcommand("valency-map", "preimage counts on a grid"), true)
      ->add_option("--grid", cfg.grid, "grid points per axis");

  add_common(app.add_subcommand("carleson", "dyadic Carleson-square ratios"), true)
      ->add_option("--dyadic-depth", cfg.dyadic_depth, "dyadic family depth");

  add_common(app.add_subcommand("lemma1", "cone-region mass scan"), true);

  add_common(app.add_subcommand("ntprofile", "preimage trajectories toward xi"),
             true)
      ->add_option("--xi-re", xi_re, "Re xi");
  app.get_subcommand("ntprofile")->add_option("--xi-im", xi_im, "Im xi");

  add_common(app.add_subcommand("mc-check",
                                "quadrature vs Monte Carlo vs series oracles"),
             false);

  CLI11_PARSE(app, argc, argv);

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? minspace::OutputFormat::json
                                : minspace::OutputFormat::csv;
  cfg.alpha = minspace::Complex(alpha_re, alpha_im);
  cfg.xi = minspace::Complex(xi_re, xi_im);

  return minspace::run(cfg, std::cout, std::cerr);
}
