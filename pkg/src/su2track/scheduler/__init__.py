"""Multi-rate job table for sensing, estimation and control."""

from su2track.scheduler.rates import JOB_ORDER, Event, MultiRateScheduler, RateJob

__all__ = ["JOB_ORDER", "Event", "MultiRateScheduler", "RateJob"]
