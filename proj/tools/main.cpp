#include <iostream>

#include "common.hpp"

using namespace polar;
using namespace polar::cli;

namespace {

int exit_code_for(const Error& e) {
  return e.code() == errc::stage_failure ? kExitStage : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polar - multilingual polarization detection toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file; sections hold per-command options")
      ->envname("POLAR_CONFIG");
  // shared configs carry sections for several commands; ignore the rest
  app.allow_config_extras(true);

  register_data_commands(app);
  register_model_commands(app);
  register_ensemble_commands(app);
  register_eval_commands(app);
  register_pipeline_command(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
