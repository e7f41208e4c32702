import { mkdir, writeFile } from "node:fs/promises";
import path from "node:path";

import { CdpConnection, discoverWebSocketUrl } from "./cdp.js";
import {
  CaptureJob,
  CmpSelector,
  DevtoolsCookie,
  Phase,
  Snapshot,
  SnapshotSchema,
  toSnapshotCookie,
} from "./types.js";

export class NavigationTimeout extends Error {}
export class CmpNotFound extends Error {}

export interface CaptureOptions {
  /** HTTP remote-debugging endpoint, e.g. http://127.0.0.1:9222 */
  endpoint: string;
  outDir: string;
  /** Delay after a consent click before cookies are read. */
  settleMs?: number;
  /** Test hook: overrides the job's navigation timeout. */
  navTimeoutMsOverride?: number;
}

export interface CaptureResult {
  site_url: string;
  country: string;
  consent_action: string;
  session_id: string | null;
  phases: Phase[];
  files: string[];
  error: string | null;
}

function hostOf(url: string): string {
  return new URL(url).hostname.toLowerCase();
}

export function snapshotFileName(siteUrl: string, phase: Phase): string {
  return `${hostOf(siteUrl)}__${phase}.json`;
}

const presenceExpression = (selector: string) =>
  `!!document.querySelector(${JSON.stringify(selector)})`;

const clickExpression = (selector: string) =>
  `(() => { const el = document.querySelector(${JSON.stringify(selector)}); ` +
  `if (!el) return false; el.click(); return true; })()`;

/** One attached page in a fresh browser context. */
class PageSession {
  constructor(
    private cdp: CdpConnection,
    private sessionId: string,
    private navTimeoutMs: number,
  ) {}

  static async open(cdp: CdpConnection, navTimeoutMs: number): Promise<PageSession> {
    const context = await cdp.send<{ browserContextId: string }>(
      "Target.createBrowserContext",
    );
    const target = await cdp.send<{ targetId: string }>("Target.createTarget", {
      url: "about:blank",
      browserContextId: context.browserContextId,
    });
    const attached = await cdp.send<{ sessionId: string }>("Target.attachToTarget", {
      targetId: target.targetId,
      flatten: true,
    });
    const session = new PageSession(cdp, attached.sessionId, navTimeoutMs);
    await cdp.send("Page.enable", {}, attached.sessionId);
    return session;
  }

  get id(): string {
    return this.sessionId;
  }

  async navigate(url: string): Promise<void> {
    const loaded = this.cdp.waitForEvent(
      "Page.loadEventFired",
      this.sessionId,
      this.navTimeoutMs,
    );
    await this.cdp.send("Page.navigate", { url }, this.sessionId);
    try {
      await loaded;
    } catch (err) {
      throw new NavigationTimeout(`navigation to ${url} did not finish: ${err}`);
    }
  }

  async evaluate(expression: string): Promise<unknown> {
    const reply = await this.cdp.send<{ result?: { value?: unknown } }>(
      "Runtime.evaluate",
      { expression, returnByValue: true },
      this.sessionId,
    );
    return reply.result?.value;
  }

  async cookies(): Promise<DevtoolsCookie[]> {
    const reply = await this.cdp.send<{ cookies: DevtoolsCookie[] }>(
      "Network.getAllCookies",
      {},
      this.sessionId,
    );
    return reply.cookies ?? [];
  }
}

function buildSnapshot(
  job: CaptureJob,
  phase: Phase,
  cmpPresent: boolean,
  cookies: DevtoolsCookie[],
): Snapshot {
  const snapshot = {
    site_url: job.site_url,
    country: job.country.toUpperCase(),
    phase,
    captured_at: Date.now() / 1000,
    cmp_present: cmpPresent,
    cookies: cookies.map(toSnapshotCookie),
  };
  return SnapshotSchema.parse(snapshot);
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

/**
 * Visit a site, interact with its consent banner, and write up to three
 * snapshot files: OnLanding always, PostConsentAccept/Reject after a consent
 * click, Revisit after a fresh navigation in the same session.
 *
 * CmpNotFound (a consent action was requested but no selector matched) still
 * writes the OnLanding snapshot; NavigationTimeout writes nothing.
 */
export async function capture(job: CaptureJob, options: CaptureOptions): Promise<CaptureResult> {
  const result: CaptureResult = {
    site_url: job.site_url,
    country: job.country.toUpperCase(),
    consent_action: job.consent_action,
    session_id: null,
    phases: [],
    files: [],
    error: null,
  };
  await mkdir(options.outDir, { recursive: true });

  const wsUrl = await discoverWebSocketUrl(options.endpoint);
  const cdp = await CdpConnection.connect(wsUrl);
  const navTimeoutMs = options.navTimeoutMsOverride ?? job.timeout_seconds * 1000;
  const settleMs = options.settleMs ?? 500;

  const writeSnapshot = async (phase: Phase, snapshot: Snapshot) => {
    const file = path.join(options.outDir, snapshotFileName(job.site_url, phase));
    await writeFile(file, JSON.stringify(snapshot, null, 2) + "\n", "utf-8");
    result.phases.push(phase);
    result.files.push(file);
  };

  try {
    const page = await PageSession.open(cdp, navTimeoutMs);
    result.session_id = page.id;

    await page.navigate(job.site_url);

    const matched: CmpSelector[] = [];
    for (const entry of job.cmp_selectors) {
      if (await page.evaluate(presenceExpression(entry.selector))) {
        matched.push(entry);
      }
    }
    const cmpPresent = matched.length > 0;

    await writeSnapshot("OnLanding", buildSnapshot(job, "OnLanding", cmpPresent, await page.cookies()));

    if (job.consent_action !== "NoAction") {
      const wanted = job.consent_action === "AcceptAll" ? "accept" : "reject";
      const target = matched.find((entry) => entry.action === wanted);
      if (!target) {
        throw new CmpNotFound(
          `no CMP selector with action ${wanted} matched on ${job.site_url}`,
        );
      }
      const clicked = await page.evaluate(clickExpression(target.selector));
      if (!clicked) {
        throw new CmpNotFound(`CMP element vanished before click: ${target.selector}`);
      }
      await sleep(settleMs);
      const phase: Phase =
        job.consent_action === "AcceptAll" ? "PostConsentAccept" : "PostConsentReject";
      await writeSnapshot(phase, buildSnapshot(job, phase, true, await page.cookies()));
    }

    await page.navigate(job.site_url);
    await writeSnapshot("Revisit", buildSnapshot(job, "Revisit", cmpPresent, await page.cookies()));
  } catch (err) {
    if (err instanceof CmpNotFound) {
      result.error = "CmpNotFound";
    } else if (err instanceof NavigationTimeout) {
      result.error = "NavigationTimeout";
    } else {
      throw err;
    }
    console.error(`capture of ${job.site_url}: ${result.error}: ${(err as Error).message}`);
  } finally {
    cdp.close();
  }
  return result;
}
