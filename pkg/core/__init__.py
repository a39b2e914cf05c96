"""Core model and agent mechanism for csf-sim"""
