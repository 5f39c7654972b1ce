/**
 * Entry point. The API base URL comes from, in order: an ?api= query
 * parameter, a window.SATKM_API_BASE global, or same-origin.
 */

import { ApiClient } from './api.js';
import { SessionController } from './app.js';

declare global {
  interface Window {
    SATKM_API_BASE?: string;
  }
}

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  if (fromQuery) return fromQuery.replace(/\/$/, '');
  if (window.SATKM_API_BASE) return window.SATKM_API_BASE.replace(/\/$/, '');
  return '';
}

const container = document.getElementById('app');
if (!container) throw new Error('missing #app element');

const controller = new SessionController(new ApiClient(apiBase()), container, {
  get: (key) => window.localStorage.getItem(key),
  set: (key, value) => window.localStorage.setItem(key, value),
  remove: (key) => window.localStorage.removeItem(key),
});
void controller.start();
