/**
 * Session recording helpers: HTTP endpoints exposed by the gateway on the
 * same port as the WebSocket listener.
 */

export interface TrialSummary {
  duration_s: number;
  trans_mean_m: number;
  trans_std_m: number;
  rot_mean_rad: number;
  rot_std_rad: number;
  delay_s: number;
}

export type FetchLike = (url: string) => Promise<{ text(): Promise<string> }>;

const defaultFetch: FetchLike = (url) => fetch(url);

export function httpBase(wsUrl: string): string {
  return wsUrl.replace(/^ws/, "http").replace(/\/$/, "");
}

export async function startRecording(base: string, f: FetchLike = defaultFetch): Promise<void> {
  await f(`${base}/record/start`);
}

export async function stopRecording(base: string, f: FetchLike = defaultFetch): Promise<void> {
  await f(`${base}/record/stop`);
}

/** Download the recorded trace as newline-delimited JSON text. */
export async function downloadTrace(base: string, f: FetchLike = defaultFetch): Promise<string> {
  const res = await f(`${base}/trace`);
  return res.text();
}

export async function fetchReport(base: string, f: FetchLike = defaultFetch): Promise<TrialSummary> {
  const res = await f(`${base}/report`);
  const report = JSON.parse(await res.text()) as TrialSummary;
  for (const [key, value] of Object.entries(report)) {
    if (typeof value !== "number" || !Number.isFinite(value)) {
      throw new Error(`report field ${key} is not a finite number`);
    }
  }
  return report;
}
