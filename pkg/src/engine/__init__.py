"""Numerical engine"""
