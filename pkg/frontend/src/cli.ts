import { mkdir, readFile, writeFile } from "node:fs/promises";
import path from "node:path";
import { parseArgs } from "node:util";

import { capture, CaptureResult } from "./capture.js";
import { JobFileSchema } from "./types.js";

function usage(): never {
  console.error(
    "usage: capture --jobs <jobs.json> --endpoint <http://host:port> --out <dir>",
  );
  process.exit(1);
}

export async function main(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      jobs: { type: "string" },
      endpoint: { type: "string" },
      out: { type: "string" },
      "settle-ms": { type: "string" },
    },
  });
  if (!values.jobs || !values.endpoint || !values.out) usage();

  const raw = JSON.parse(await readFile(values.jobs, "utf-8"));
  const jobs = JobFileSchema.parse(raw);
  await mkdir(values.out, { recursive: true });

  const startedAt = Date.now() / 1000;
  const results: CaptureResult[] = [];
  for (const job of jobs) {
    console.error(`capturing ${job.site_url} (${job.consent_action})`);
    results.push(
      await capture(job, {
        endpoint: values.endpoint,
        outDir: values.out,
        settleMs: values["settle-ms"] ? Number(values["settle-ms"]) : undefined,
      }),
    );
  }

  const sidecar = {
    started_at: startedAt,
    finished_at: Date.now() / 1000,
    endpoint: values.endpoint,
    jobs: results,
  };
  await writeFile(
    path.join(values.out, "run_meta.json"),
    JSON.stringify(sidecar, null, 2) + "\n",
    "utf-8",
  );

  const failed = results.filter((r) => r.error !== null).length;
  console.error(`${results.length} job(s), ${failed} with errors`);
  return failed ? 1 : 0;
}

if (process.argv[1] && import.meta.url.endsWith(path.basename(process.argv[1]))) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(err);
      process.exit(1);
    },
  );
}
