import type { StudyStatus } from "./types.js";

/**
 * Poll a study job until it leaves the running state. Resolves with the
 * terminal status; rejects on timeout or transport failure.
 */
export async function pollStudy(
  fetchStatus: (id: string) => Promise<StudyStatus>,
  reportId: string,
  intervalMs = 250,
  timeoutMs = 120_000,
): Promise<StudyStatus> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const status = await fetchStatus(reportId);
    if (status.status !== "running") return status;
    if (Date.now() > deadline) throw new Error(`study ${reportId} timed out`);
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
