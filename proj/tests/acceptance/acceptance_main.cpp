#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "tractdyn/acceptance.hpp"
#include "tractdyn/parallel.hpp"

int main(int argc, char** argv) {
  tractdyn::AcceptanceOptions opts;
  unsigned threads = 0;
  CLI::App app{"acceptance suite"};
  app.add_option("--seed", opts.seed);
  app.add_option("--threads", threads);
  app.add_option("--rerun-threads", opts.rerun_threads);
  app.add_option("--only", opts.only)->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) tractdyn::set_thread_count(threads);

  const auto results = tractdyn::run_acceptance(opts);
  std::fputs(tractdyn::format_report(results, true).c_str(), stdout);
  return tractdyn::all_passed(results, true) ? 0 : 1;
}
