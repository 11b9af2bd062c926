/**
 * Supersede guard for in-flight requests: responses render only if they
 * belong to the most recently issued request, so a slow early response can
 * never overwrite a newer one.
 */
export class LatestGate {
  private counter = 0;

  issue(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(id: number): boolean {
    return id === this.counter;
  }
}
