/**
 * Shapes of the backend's JSON documents. Every number the UI shows
 * comes from one of these; the client performs no statistics of its own.
 */

export interface CurvePoint {
  seq: number;
  n_at_risk: number;
  event: number;
  S: number;
  /** Variance of log S; null when the server value is not finite. */
  V: number | null;
  ci_low: number | null;
  ci_high: number | null;
}

export interface CurveSummary {
  km_zero_seq: number | null;
  km_extrapolated_zero: number | null;
  upper_ci_extrapolated_zero: number | null;
}

export interface Curve {
  alpha: number;
  z: number;
  points: CurvePoint[];
  summary: CurveSummary;
}

export type EntryMode = 'codes' | 'count';

export interface InterviewRow {
  seq: number;
  interview_id: string;
  mode: EntryMode;
  code_ids: string[];
  new_codes: number;
}

export interface CrcRow {
  seq: number;
  M: number;
  C: number;
  R: number;
  lp: number | null;
  chapman: number | null;
  good_turing: number | null;
  remaining_lp: number | null;
  remaining_chapman: number | null;
  remaining_good_turing: number | null;
}

export interface RuleStatus {
  stopped: boolean;
  stop_seq: number | null;
}

export interface SessionDoc {
  session_id: string;
  name: string;
  alpha: number;
  created_at: string;
  crc_degraded: boolean;
  interviews: InterviewRow[];
  new_codes: number[];
  curve: Curve | null;
  crc: CrcRow[];
  stopping_rules: Record<string, RuleStatus>;
}

export type ProjectionMethod = 'extrapolation' | 'rule_completion';

export interface WhatifResponse {
  pattern: number[];
  km_final: number;
  ci_low: number | null;
  ci_high: number | null;
  additional_interviews: Partial<Record<ProjectionMethod, number | null>>;
  realized_interviews: number;
  hypothetical_interviews: number;
  curve: Curve;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export interface InterviewEntry {
  interview_id: string;
  code_ids?: string[];
  new_codes?: number;
}
