/** WebAudio playback of a melody plan. No model math happens here. */

import { buildPlan } from "./schedule.js";

export type PlayOutcome = "ok" | "blocked";

/**
 * Minimal audition player: one oscillator plus gain envelope per note,
 * rests left silent. All playback derives from melodies the server
 * already returned; nothing is synthesized locally beyond the tones.
 */
export class MelodyPlayer {
  private ctx: AudioContext | null = null;
  private active: { osc: OscillatorNode; gain: GainNode }[] = [];
  private stopTimer: number | null = null;
  onended: (() => void) | null = null;

  private context(): AudioContext {
    if (this.ctx === null) {
      const Ctor =
        window.AudioContext ??
        (window as unknown as { webkitAudioContext: typeof AudioContext })
          .webkitAudioContext;
      this.ctx = new Ctor();
    }
    return this.ctx;
  }

  /**
   * Schedule a melody. Returns "blocked" when the browser keeps the
   * context suspended (autoplay policy); the caller should surface a
   * prompt and retry from a user gesture.
   */
  async play(melody: [string, string][], bpm: number): Promise<PlayOutcome> {
    const ctx = this.context();
    if (ctx.state === "suspended") {
      try {
        await ctx.resume();
      } catch {
        return "blocked";
      }
    }
    if (ctx.state !== "running") return "blocked";

    this.stop();
    const plan = buildPlan(melody, bpm);
    const t0 = ctx.currentTime + 0.05;
    for (const ev of plan.events) {
      if (ev.frequency === null) continue;
      const osc = ctx.createOscillator();
      const gain = ctx.createGain();
      osc.type = "triangle";
      osc.frequency.value = ev.frequency;
      const start = t0 + ev.start;
      const end = start + ev.seconds;
      const release = Math.min(0.04, ev.seconds * 0.25);
      gain.gain.setValueAtTime(0, start);
      gain.gain.linearRampToValueAtTime(0.25, start + 0.01);
      gain.gain.setValueAtTime(0.25, Math.max(start + 0.01, end - release));
      gain.gain.linearRampToValueAtTime(0, end);
      osc.connect(gain).connect(ctx.destination);
      osc.start(start);
      osc.stop(end + 0.01);
      this.active.push({ osc, gain });
    }
    this.stopTimer = window.setTimeout(() => {
      this.stopTimer = null;
      this.active = [];
      this.onended?.();
    }, (plan.totalSeconds + 0.2) * 1000);
    return "ok";
  }

  /** Cancel anything scheduled and silence the output immediately. */
  stop(): void {
    for (const { osc, gain } of this.active) {
      try {
        osc.stop();
      } catch {
        // already stopped
      }
      osc.disconnect();
      gain.disconnect();
    }
    this.active = [];
    if (this.stopTimer !== null) {
      window.clearTimeout(this.stopTimer);
      this.stopTimer = null;
    }
  }

  get playing(): boolean {
    return this.active.length > 0;
  }
}
