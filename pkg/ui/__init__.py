"""Terminal presentation and command implementations for csf-sim"""
