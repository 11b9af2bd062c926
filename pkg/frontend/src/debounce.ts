/**
 * Trailing-edge debouncer: the wrapped function fires `delayMs` after the
 * last call. Prevents request floods while a slider is being dragged.
 */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs: number,
): { (...args: A): void; cancel(): void } {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, delayMs);
  };
  wrapped.cancel = () => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
  };
  return wrapped;
}

/** Slider debounce interval: sub-perceptual, but coalesces drag events. */
export const SLIDER_DEBOUNCE_MS = 150;
