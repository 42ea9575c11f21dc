#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edgelbp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,        ///< I/O or any other error
  kParseError = 2,     ///< bad command line, config, mesh, descriptor or matrix text
  kIncompatible = 3,   ///< descriptors built with different parameters
  kNoAdmissible = 4,   ///< a mesh has no vertex admitting the requested rings
};

/// Runs one command line (without the program name). Messages go to `out`, errors to `err`.
///
///   describe  MESH... [--manifest FILE] --out DIR [--kind edgelbp|hist1|hist2]
///   distmat   DESC... --out FILE
///   evaluate  --matrix FILE --manifest FILE --out DIR
///   generate  --out DIR [--resolution N]
///   inspect   MESH --vertex V [--start-field FILE]
///
/// Shared flags: --P --Nr --Rmax --h {lab,gray} --exp --metric {bha,euc,emd} --threads --seed
/// --ecut, and --config FILE with key=value lines. Flags override the config file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgelbp::cli
