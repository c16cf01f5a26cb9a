#!/usr/bin/env node
// Minimal SMT solver shim: reads an SMT-LIB2 script on stdin, evaluates it
// with the z3-solver WASM build, and prints the solver output verbatim on
// stdout (first token sat/unsat/unknown). Exits 1 when z3 itself cannot be
// loaded so callers can distinguish infrastructure failures from verdicts.

"use strict";

const fs = require("fs");
const path = require("path");

function loadZ3() {
  const attempts = ["z3-solver"];
  try {
    const globalRoot = require("child_process")
      .execSync("npm root -g", { stdio: ["ignore", "pipe", "ignore"] })
      .toString()
      .trim();
    attempts.push(path.join(globalRoot, "z3-solver"));
  } catch (err) {
    // npm missing; fall through to the plain require attempts
  }
  for (const spec of attempts) {
    try {
      return require(spec);
    } catch (err) {
      // keep trying
    }
  }
  throw new Error("z3-solver module not found; run: npm install -g z3-solver");
}

(async () => {
  const script = fs.readFileSync(0, "utf8");
  const { init } = loadZ3();
  const { Z3, em } = await init();
  const ctx = Z3.mk_context(Z3.mk_config());
  const out = await Z3.eval_smtlib2_string(ctx, script);
  process.stdout.write(out);
  em.PThread.terminateAllThreads();
  process.exit(0);
})().catch((err) => {
  process.stderr.write(String(err && err.message ? err.message : err) + "\n");
  process.exit(1);
});
