// Explorer parity: replaying the guided tour through the real HTTP service
// must land on CQC text byte-identical to the CLI derivation output, with
// a verified equivalence badge at every step. Spawns the actual Python
// server as a subprocess.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ExplorerApi } from "../src/api.js";
import { runTour, type TourData } from "../src/tour.js";

const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");
const tourPath = join(here, "..", "tours", "bv_10110011.json");

const PORT = 8700 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/rules`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("session service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "qrewrite.cli", "serve", "--port", String(PORT)],
    { cwd: repoRoot, stdio: "ignore" },
  );
  await waitForService();
}, 60_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

function cliDerivation(secret: string): TourData {
  const out = execFileSync(
    "python3",
    ["-m", "qrewrite.cli", "derive", "bv", "--secret", secret, "--json"],
    { cwd: repoRoot, encoding: "utf-8", maxBuffer: 64 * 1024 * 1024 },
  );
  return JSON.parse(out) as TourData;
}

describe("guided tour parity with the CLI derivation", () => {
  it("shipped tour data matches a fresh CLI derivation", () => {
    const shipped = JSON.parse(readFileSync(tourPath, "utf-8")) as TourData;
    const fresh = cliDerivation("10110011");
    expect(shipped.steps).toEqual(fresh.steps);
    expect(shipped.final_cqc).toEqual(fresh.final_cqc);
    expect(shipped.snapshots).toEqual(fresh.snapshots);
  });

  it("replaying the tour over HTTP is byte-identical to the CLI output "
     + "with verified badges throughout", async () => {
    const tour = JSON.parse(readFileSync(tourPath, "utf-8")) as TourData;
    const api = new ExplorerApi(BASE);
    const result = await runTour(api, tour);
    expect(result.badges).toHaveLength(tour.steps.length);
    for (const badge of result.badges) {
      expect(badge).toMatch(/^verified/);
    }
    expect(result.finalCqc).toBe(tour.final_cqc);

    // The session's final state agrees with the canonical layout hash.
    const session = await api.getSession(result.sessionId);
    expect(session.circuit.cqc).toBe(tour.final_cqc);
    expect(session.history_length).toBe(tour.steps.length + 1);
  }, 120_000);

  it("a smaller secret tours end to end as well", async () => {
    const tour = cliDerivation("101");
    const api = new ExplorerApi(BASE);
    const result = await runTour(api, tour);
    expect(result.finalCqc).toBe(tour.final_cqc);
  }, 60_000);
});
